//! Axial 3-dimensional assignment: one selected cell per line of the cube,
//! equivalently a Latin square `latin[i][j] = k`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::CostTensor;
use crate::matching::{expected_parisi, solve_assignment, BipartiteCosts};

/// Largest order accepted by [`exact_axial`].
pub const EXACT_AXIAL_MAX_N: usize = 4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxialSolution {
    pub latin: Vec<Vec<usize>>,
    /// Cost of the matching chosen in each plane, in plane order.
    pub plane_costs: Vec<f64>,
    pub total_cost: f64,
}

impl AxialSolution {
    pub fn is_latin(&self) -> bool {
        is_latin_square(&self.latin)
    }

    pub fn recompute_cost(&self, t: &CostTensor) -> f64 {
        latin_cost(t, &self.latin)
    }
}

pub fn is_latin_square(latin: &[Vec<usize>]) -> bool {
    let n = latin.len();
    let rows_ok = latin.iter().all(|row| {
        let mut seen = vec![false; n];
        row.len() == n
            && row
                .iter()
                .all(|&k| k < n && !std::mem::replace(&mut seen[k], true))
    });
    rows_ok
        && (0..n).all(|j| {
            let mut seen = vec![false; n];
            latin
                .iter()
                .all(|row| !std::mem::replace(&mut seen[row[j]], true))
        })
}

fn latin_cost(t: &CostTensor, latin: &[Vec<usize>]) -> f64 {
    latin
        .iter()
        .enumerate()
        .flat_map(|(i, row)| {
            row.iter()
                .enumerate()
                .map(move |(j, &k)| t.pristine3(i, j, k))
        })
        .sum()
}

fn plane_costs(t: &CostTensor, i: usize) -> BipartiteCosts {
    BipartiteCosts::new(t.n(), t.pristine_plane(i).to_vec()).expect("plane of a valid tensor")
}

/// Plane-by-plane greedy: plane `i` takes a minimum-cost perfect matching of
/// `K_{n,n}` minus the matchings already used by planes `0..i`.
pub fn greedy_axial(t: &CostTensor) -> Result<AxialSolution> {
    t.require_dim(3)?;
    let n = t.n();
    let mut used = vec![false; n * n];
    let mut latin = Vec::with_capacity(n);
    let mut plane_costs_out = Vec::with_capacity(n);
    for i in 0..n {
        let mut bc = plane_costs(t, i);
        for (e, _) in used.iter().enumerate().filter(|(_, u)| **u) {
            bc.forbid(e / n, e % n);
        }
        // The residual graph is (n - i)-regular bipartite, so a perfect
        // matching always exists.
        let m = solve_assignment(&bc).expect("regular bipartite graph has a perfect matching");
        for (j, &k) in m.assignment.iter().enumerate() {
            used[j * n + k] = true;
        }
        plane_costs_out.push(m.cost);
        latin.push(m.assignment);
    }
    let total_cost = plane_costs_out.iter().sum();
    Ok(AxialSolution {
        latin,
        plane_costs: plane_costs_out,
        total_cost,
    })
}

/// Sum over planes of the unconstrained optimal 2D assignment cost.
pub fn axial_lower_bound(t: &CostTensor) -> Result<f64> {
    t.require_dim(3)?;
    Ok((0..t.n())
        .map(|i| {
            solve_assignment(&plane_costs(t, i))
                .expect("unconstrained plane is feasible")
                .cost
        })
        .sum())
}

/// `sum_{i=1}^n 2n / (n - i + 1) = 2n H_n`.
pub fn dfm_bound(n: usize) -> f64 {
    let nf = n as f64;
    (1..=n).map(|i| 2.0 * nf / (n - i + 1) as f64).sum()
}

/// Expected value of [`axial_lower_bound`]: `n * sum 1/i^2`.
pub fn expected_axial_lower_bound(n: usize) -> f64 {
    n as f64 * expected_parisi(n)
}

/// Visits every Latin square of order `n` in row-major backtracking order.
pub fn for_each_latin_square(n: usize, mut visit: impl FnMut(&[Vec<usize>])) {
    fn fill(
        n: usize,
        cell: usize,
        sq: &mut Vec<Vec<usize>>,
        row_used: &mut [Vec<bool>],
        col_used: &mut [Vec<bool>],
        visit: &mut dyn FnMut(&[Vec<usize>]),
    ) {
        if cell == n * n {
            visit(sq);
            return;
        }
        let (i, j) = (cell / n, cell % n);
        for k in 0..n {
            if row_used[i][k] || col_used[j][k] {
                continue;
            }
            row_used[i][k] = true;
            col_used[j][k] = true;
            sq[i][j] = k;
            fill(n, cell + 1, sq, row_used, col_used, visit);
            row_used[i][k] = false;
            col_used[j][k] = false;
        }
    }
    let mut sq = vec![vec![0; n]; n];
    let mut row_used = vec![vec![false; n]; n];
    let mut col_used = vec![vec![false; n]; n];
    fill(n, 0, &mut sq, &mut row_used, &mut col_used, &mut visit);
}

pub fn count_latin_squares(n: usize) -> usize {
    let mut count = 0;
    for_each_latin_square(n, |_| count += 1);
    count
}

/// Exhaustive minimum over all Latin squares; `n <= 4`.
pub fn exact_axial(t: &CostTensor) -> Result<AxialSolution> {
    t.require_dim(3)?;
    let n = t.n();
    if n > EXACT_AXIAL_MAX_N {
        return Err(Error::SizeGuard {
            what: "exact_axial",
            n,
            max: EXACT_AXIAL_MAX_N,
        });
    }
    let mut best: Option<(f64, Vec<Vec<usize>>)> = None;
    for_each_latin_square(n, |sq| {
        let c = latin_cost(t, sq);
        if best.as_ref().is_none_or(|(b, _)| c < *b) {
            best = Some((c, sq.to_vec()));
        }
    });
    let (total_cost, latin) = best.expect("at least one Latin square exists");
    let plane_costs = latin
        .iter()
        .enumerate()
        .map(|(i, row)| {
            row.iter()
                .enumerate()
                .map(|(j, &k)| t.pristine3(i, j, k))
                .sum()
        })
        .collect();
    Ok(AxialSolution {
        latin,
        plane_costs,
        total_cost,
    })
}
