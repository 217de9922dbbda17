//! Exact minimum-cost perfect matching on dense bipartite graphs.
//!
//! [`solve_assignment`] is the shortest-augmenting-path Hungarian method with
//! row/column potentials, `O(n^3)`. Forbidden edges are skipped structurally,
//! so a row that cannot be augmented proves there is no perfect matching.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Largest size accepted by [`brute_force_assignment`].
pub const BRUTE_FORCE_MAX_N: usize = 9;

/// Dense `n x n` costs with an optional set of forbidden `(j, k)` edges.
#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteCosts {
    n: usize,
    cost: Vec<f64>,
    forbidden: Vec<bool>,
}

impl BipartiteCosts {
    /// `cost` is row-major: `cost[j * n + k]`.
    pub fn new(n: usize, cost: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(invalid("assignment size must be positive"));
        }
        if cost.len() != n * n {
            return Err(invalid(format!(
                "expected {} costs, got {}",
                n * n,
                cost.len()
            )));
        }
        if let Some(bad) = cost.iter().find(|c| !c.is_finite()) {
            return Err(invalid(format!("costs must be finite, found {bad}")));
        }
        Ok(Self {
            n,
            cost,
            forbidden: vec![false; n * n],
        })
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> f64) -> Result<Self> {
        let cost = (0..n * n).map(|v| f(v / n, v % n)).collect();
        Self::new(n, cost)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn cost(&self, j: usize, k: usize) -> f64 {
        self.cost[j * self.n + k]
    }

    pub fn forbid(&mut self, j: usize, k: usize) {
        self.forbidden[j * self.n + k] = true;
    }

    #[inline]
    pub fn is_forbidden(&self, j: usize, k: usize) -> bool {
        self.forbidden[j * self.n + k]
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            n: self.n,
            cost: self.cost.iter().map(|c| c * factor).collect(),
            forbidden: self.forbidden.clone(),
        }
    }

    /// Total cost of `assignment` (j -> k), checking it is a perfect matching
    /// that avoids forbidden edges.
    pub fn evaluate(&self, assignment: &[usize]) -> Result<f64> {
        if assignment.len() != self.n {
            return Err(invalid("assignment length differs from n"));
        }
        let mut seen = vec![false; self.n];
        let mut total = 0.0;
        for (j, &k) in assignment.iter().enumerate() {
            if k >= self.n || seen[k] {
                return Err(invalid("assignment is not a permutation"));
            }
            if self.is_forbidden(j, k) {
                return Err(invalid(format!(
                    "assignment uses forbidden edge ({j}, {k})"
                )));
            }
            seen[k] = true;
            total += self.cost(j, k);
        }
        Ok(total)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Matching {
    /// `assignment[j] = k`.
    pub assignment: Vec<usize>,
    pub cost: f64,
}

pub fn solve_assignment(bc: &BipartiteCosts) -> Result<Matching> {
    let n = bc.n;
    let inf = f64::INFINITY;
    // 1-based with a virtual column 0, as in the classic potentials formulation.
    let mut u = vec![0.0f64; n + 1];
    let mut v = vec![0.0f64; n + 1];
    let mut row_of = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    let mut minv = vec![inf; n + 1];
    let mut used = vec![false; n + 1];

    for row in 1..=n {
        row_of[0] = row;
        let mut col0 = 0usize;
        minv.fill(inf);
        used.fill(false);
        loop {
            used[col0] = true;
            let r = row_of[col0];
            let mut delta = inf;
            let mut col1 = 0usize;
            for col in 1..=n {
                if used[col] {
                    continue;
                }
                if !bc.is_forbidden(r - 1, col - 1) {
                    let reduced = bc.cost(r - 1, col - 1) - u[r] - v[col];
                    if reduced < minv[col] {
                        minv[col] = reduced;
                        way[col] = col0;
                    }
                }
                if minv[col] < delta {
                    delta = minv[col];
                    col1 = col;
                }
            }
            if col1 == 0 {
                return Err(Error::Infeasible);
            }
            for col in 0..=n {
                if used[col] {
                    u[row_of[col]] += delta;
                    v[col] -= delta;
                } else {
                    minv[col] -= delta;
                }
            }
            col0 = col1;
            if row_of[col0] == 0 {
                break;
            }
        }
        loop {
            let prev = way[col0];
            row_of[col0] = row_of[prev];
            col0 = prev;
            if col0 == 0 {
                break;
            }
        }
    }

    let mut assignment = vec![0usize; n];
    for col in 1..=n {
        assignment[row_of[col] - 1] = col - 1;
    }
    let cost = bc.evaluate(&assignment)?;
    Ok(Matching { assignment, cost })
}

/// Exhaustive minimum over all permutations; `n <= 9`.
pub fn brute_force_assignment(bc: &BipartiteCosts) -> Result<Matching> {
    let n = bc.n;
    if n > BRUTE_FORCE_MAX_N {
        return Err(Error::SizeGuard {
            what: "brute_force_assignment",
            n,
            max: BRUTE_FORCE_MAX_N,
        });
    }

    struct Search<'a> {
        bc: &'a BipartiteCosts,
        current: Vec<usize>,
        used: Vec<bool>,
        best: Option<(f64, Vec<usize>)>,
    }

    impl Search<'_> {
        fn go(&mut self, j: usize) {
            let n = self.bc.n;
            if j == n {
                // Sum in row order so the result matches `evaluate` bit for bit.
                let total: f64 = self
                    .current
                    .iter()
                    .enumerate()
                    .map(|(j, &k)| self.bc.cost(j, k))
                    .sum();
                if self.best.as_ref().is_none_or(|(b, _)| total < *b) {
                    self.best = Some((total, self.current.clone()));
                }
                return;
            }
            for k in 0..n {
                if self.used[k] || self.bc.is_forbidden(j, k) {
                    continue;
                }
                self.used[k] = true;
                self.current.push(k);
                self.go(j + 1);
                self.current.pop();
                self.used[k] = false;
            }
        }
    }

    let mut s = Search {
        bc,
        current: Vec::with_capacity(n),
        used: vec![false; n],
        best: None,
    };
    s.go(0);
    s.best
        .map(|(cost, assignment)| Matching { assignment, cost })
        .ok_or(Error::Infeasible)
}

/// Maximum-cardinality matching size over non-forbidden edges (Kuhn's
/// augmenting paths). Independent of costs; used to cross-check feasibility.
pub fn max_cardinality(bc: &BipartiteCosts) -> usize {
    fn augment(
        bc: &BipartiteCosts,
        j: usize,
        seen: &mut [bool],
        owner: &mut [Option<usize>],
    ) -> bool {
        for k in 0..bc.n {
            if bc.is_forbidden(j, k) || seen[k] {
                continue;
            }
            seen[k] = true;
            if owner[k].is_none_or(|o| augment(bc, o, seen, owner)) {
                owner[k] = Some(j);
                return true;
            }
        }
        false
    }

    let mut owner = vec![None; bc.n];
    (0..bc.n)
        .filter(|&j| {
            let mut seen = vec![false; bc.n];
            augment(bc, j, &mut seen, &mut owner)
        })
        .count()
}

/// `sum_{i=1}^n 1/i^2`, the expected optimal cost of an `n x n` random
/// assignment instance with Exp(1) costs.
pub fn expected_parisi(n: usize) -> f64 {
    (1..=n).rev().map(|i| 1.0 / (i as f64 * i as f64)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_diagonal() {
        let bc = BipartiteCosts::from_fn(3, |j, k| if j == k { 0.0 } else { 1.0 }).unwrap();
        let m = solve_assignment(&bc).unwrap();
        assert_eq!(m.assignment, vec![0, 1, 2]);
        assert_eq!(m.cost, 0.0);
    }

    #[test]
    fn two_by_two() {
        let bc = BipartiteCosts::new(2, vec![1.0, 2.0, 3.0, 1.0]).unwrap();
        let m = solve_assignment(&bc).unwrap();
        assert_eq!(m.assignment, vec![0, 1]);
        assert_eq!(m.cost, 2.0);
        assert_eq!(brute_force_assignment(&bc).unwrap(), m);
    }

    #[test]
    fn all_forbidden_is_infeasible() {
        let mut bc = BipartiteCosts::new(2, vec![1.0; 4]).unwrap();
        for j in 0..2 {
            for k in 0..2 {
                bc.forbid(j, k);
            }
        }
        assert_eq!(solve_assignment(&bc), Err(Error::Infeasible));
        assert_eq!(brute_force_assignment(&bc), Err(Error::Infeasible));
        assert_eq!(max_cardinality(&bc), 0);
    }

    #[test]
    fn hall_violation_is_infeasible() {
        // Rows 0 and 1 may only use column 0.
        let mut bc = BipartiteCosts::new(3, vec![1.0; 9]).unwrap();
        for j in 0..2 {
            bc.forbid(j, 1);
            bc.forbid(j, 2);
        }
        assert_eq!(solve_assignment(&bc), Err(Error::Infeasible));
        assert_eq!(max_cardinality(&bc), 2);
    }

    #[test]
    fn forced_by_forbidden_edges() {
        let mut bc = BipartiteCosts::new(2, vec![0.0, 5.0, 5.0, 0.0]).unwrap();
        bc.forbid(0, 0);
        let m = solve_assignment(&bc).unwrap();
        assert_eq!(m.assignment, vec![1, 0]);
        assert_eq!(m.cost, 10.0);
    }

    #[test]
    fn brute_force_small_cases() {
        let bc = BipartiteCosts::new(1, vec![2.5]).unwrap();
        assert_eq!(brute_force_assignment(&bc).unwrap().cost, 2.5);
        let bc = BipartiteCosts::new(3, vec![0.75; 9]).unwrap();
        assert_eq!(brute_force_assignment(&bc).unwrap().cost, 2.25);
        let bc = BipartiteCosts::new(10, vec![1.0; 100]).unwrap();
        assert!(matches!(
            brute_force_assignment(&bc),
            Err(Error::SizeGuard { .. })
        ));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(BipartiteCosts::new(0, vec![]).is_err());
        assert!(BipartiteCosts::new(2, vec![1.0; 3]).is_err());
        assert!(BipartiteCosts::new(1, vec![f64::NAN]).is_err());
    }

    #[test]
    fn parisi_values() {
        assert_eq!(expected_parisi(1), 1.0);
        assert_eq!(expected_parisi(2), 1.25);
        let zeta2 = std::f64::consts::PI.powi(2) / 6.0;
        let mut prev = 0.0;
        for n in [1, 10, 100, 1000, 100_000] {
            let f = expected_parisi(n);
            assert!(f > prev && f < zeta2);
            prev = f;
        }
        assert!((zeta2 - expected_parisi(100_000)) < 1.1e-5);
    }
}
