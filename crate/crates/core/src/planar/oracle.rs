//! Exact planar oracles and the row-minimum lower bound.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{checked_len, CostTensor, EntryStream, Triple};
use crate::matching::{solve_assignment, BipartiteCosts};
use crate::perm::for_each_permutation;

pub const EXACT_PLANAR_MAX_N: usize = 8;
pub const BRUTE_PLANAR_MAX_N: usize = 6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanarSolution {
    /// One triple per first coordinate, ordered by it.
    pub triples: Vec<Triple>,
    pub cost: f64,
}

/// True when `triples` is a complete planar assignment of order `n`.
pub fn is_complete_planar(n: usize, triples: &[Triple]) -> bool {
    if triples.len() != n {
        return false;
    }
    let mut seen = [vec![false; n], vec![false; n], vec![false; n]];
    triples.iter().all(|t| {
        t.iter()
            .enumerate()
            .all(|(axis, &c)| c < n && !std::mem::replace(&mut seen[axis][c], true))
    })
}

/// `sum_i min over the slice with first coordinate i`, on pristine values.
/// Valid for any `d >= 2`.
pub fn lower_bound_rowmin(t: &CostTensor) -> f64 {
    let slice = t.len() / t.n();
    t.pristine()
        .chunks(slice)
        .map(|s| s.iter().copied().fold(f64::INFINITY, f64::min))
        .sum()
}

/// Same value as [`lower_bound_rowmin`] on `CostTensor::generate(n, d, seed)`
/// without storing the tensor.
pub fn lower_bound_rowmin_streaming(n: usize, d: usize, seed: u64) -> Result<f64> {
    let len = checked_len(n, d)?;
    let slice = len / n;
    let mut stream = EntryStream::new(seed);
    Ok((0..n)
        .map(|_| stream.by_ref().take(slice).fold(f64::INFINITY, f64::min))
        .sum())
}

/// Exact optimum over pairs of permutations: every assignment of second
/// coordinates is enumerated and the third coordinates are then chosen by an
/// exact 2D assignment. `n <= 8`.
pub fn exact_planar(t: &CostTensor) -> Result<PlanarSolution> {
    t.require_dim(3)?;
    let n = t.n();
    if n > EXACT_PLANAR_MAX_N {
        return Err(Error::SizeGuard {
            what: "exact_planar",
            n,
            max: EXACT_PLANAR_MAX_N,
        });
    }
    let mut best: Option<(f64, Vec<usize>, Vec<usize>)> = None;
    let mut cost = vec![0.0; n * n];
    for_each_permutation(n, |pi| {
        for i in 0..n {
            for k in 0..n {
                cost[i * n + k] = t.pristine3(i, pi[i], k);
            }
        }
        let bc = BipartiteCosts::new(n, cost.clone()).expect("finite costs");
        let m = solve_assignment(&bc).expect("complete bipartite graph");
        if best.as_ref().is_none_or(|(b, _, _)| m.cost < *b) {
            best = Some((m.cost, pi.to_vec(), m.assignment));
        }
    });
    let (_, pi, sigma) = best.expect("n >= 1");
    let triples: Vec<Triple> = (0..n).map(|i| [i, pi[i], sigma[i]]).collect();
    let cost = t.true_cost(&triples)?;
    Ok(PlanarSolution { triples, cost })
}

/// Direct enumeration of all `n! * n!` permutation pairs; `n <= 6`.
pub fn brute_force_planar(t: &CostTensor) -> Result<PlanarSolution> {
    t.require_dim(3)?;
    let n = t.n();
    if n > BRUTE_PLANAR_MAX_N {
        return Err(Error::SizeGuard {
            what: "brute_force_planar",
            n,
            max: BRUTE_PLANAR_MAX_N,
        });
    }
    let mut perms = Vec::new();
    for_each_permutation(n, |p| perms.push(p.to_vec()));
    let mut best = (f64::INFINITY, 0, 0);
    for (a, pi) in perms.iter().enumerate() {
        for (b, sigma) in perms.iter().enumerate() {
            let c: f64 = (0..n).map(|i| t.pristine3(i, pi[i], sigma[i])).sum();
            if c < best.0 {
                best = (c, a, b);
            }
        }
    }
    let triples: Vec<Triple> = (0..n)
        .map(|i| [i, perms[best.1][i], perms[best.2][i]])
        .collect();
    Ok(PlanarSolution {
        triples,
        cost: best.0,
    })
}
