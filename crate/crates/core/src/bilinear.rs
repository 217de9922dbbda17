//! Alternating heuristic for the bilinear form of the planar problem,
//! `C(y, z) = sum_{i,j,k} C[i,j,k] y[i,j] z[i,k]` over permutation matrices.
//!
//! With one factor fixed the objective is linear in the other, so each half
//! step is an exact 2D assignment and iterates stay permutations.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::instance::CostTensor;
use crate::matching::{solve_assignment, BipartiteCosts};
use crate::perm::is_permutation;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum Direction {
    #[default]
    Minimize,
    /// Inner steps maximize instead. Kept for comparison only.
    Maximize,
}

impl Direction {
    fn improves(self, new: f64, old: f64) -> bool {
        match self {
            Direction::Minimize => new < old,
            Direction::Maximize => new > old,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorPair {
    /// `y[i] = j`.
    pub y: Vec<usize>,
    /// `z[i] = k`.
    pub z: Vec<usize>,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BilinearResult {
    pub pair: FactorPair,
    /// `Z_0, Z_1, ...`: the value at the start and after every sweep.
    pub trace: Vec<f64>,
    pub converged: bool,
}

impl BilinearResult {
    pub fn sweeps(&self) -> usize {
        self.trace.len() - 1
    }
}

fn check_perm(t: &CostTensor, p: &[usize], name: &str) -> Result<()> {
    if p.len() != t.n() || !is_permutation(p) {
        return Err(invalid(format!(
            "{name} must be a permutation of 0..{}",
            t.n()
        )));
    }
    Ok(())
}

/// `sum_i C[i, y(i), z(i)]` on pristine values.
pub fn bilinear_value(t: &CostTensor, y: &[usize], z: &[usize]) -> f64 {
    (0..t.n()).map(|i| t.pristine3(i, y[i], z[i])).sum()
}

fn solve_factor(t: &CostTensor, dir: Direction, cost: impl Fn(usize, usize) -> f64) -> Vec<usize> {
    let sign = match dir {
        Direction::Minimize => 1.0,
        Direction::Maximize => -1.0,
    };
    let bc = BipartiteCosts::from_fn(t.n(), |i, x| sign * cost(i, x)).expect("finite costs");
    solve_assignment(&bc)
        .expect("complete bipartite graph")
        .assignment
}

/// Best `y` for fixed `z`: assignment over `(i, j)` with cost `C[i, j, z(i)]`.
pub fn bilinear_step_y(t: &CostTensor, z: &[usize], dir: Direction) -> Result<Vec<usize>> {
    t.require_dim(3)?;
    check_perm(t, z, "z")?;
    Ok(solve_factor(t, dir, |i, j| t.pristine3(i, j, z[i])))
}

/// Best `z` for fixed `y`: assignment over `(i, k)` with cost `C[i, y(i), k]`.
pub fn bilinear_step_z(t: &CostTensor, y: &[usize], dir: Direction) -> Result<Vec<usize>> {
    t.require_dim(3)?;
    check_perm(t, y, "y")?;
    Ok(solve_factor(t, dir, |i, k| t.pristine3(i, y[i], k)))
}

/// Alternates the two exact half steps until a sweep leaves the value
/// unchanged or `max_iters` sweeps have run. A half step replaces the current
/// factor only on strict improvement, so the trace is monotone.
pub fn bilinear_heuristic(
    t: &CostTensor,
    y0: &[usize],
    z0: &[usize],
    max_iters: usize,
    dir: Direction,
) -> Result<BilinearResult> {
    t.require_dim(3)?;
    check_perm(t, y0, "y0")?;
    check_perm(t, z0, "z0")?;
    if max_iters == 0 {
        return Err(invalid("max_iters must be at least 1"));
    }
    let (mut y, mut z) = (y0.to_vec(), z0.to_vec());
    let mut value = bilinear_value(t, &y, &z);
    let mut trace = vec![value];
    let mut converged = false;
    for _ in 0..max_iters {
        let y_new = bilinear_step_y(t, &z, dir)?;
        let v = bilinear_value(t, &y_new, &z);
        if dir.improves(v, value) {
            y = y_new;
            value = v;
        }
        let z_new = bilinear_step_z(t, &y, dir)?;
        let v = bilinear_value(t, &y, &z_new);
        if dir.improves(v, value) {
            z = z_new;
            value = v;
        }
        let prev = *trace.last().expect("nonempty");
        trace.push(value);
        if value == prev {
            converged = true;
            break;
        }
    }
    Ok(BilinearResult {
        pair: FactorPair { y, z, value },
        trace,
        converged,
    })
}

/// Runs from the identity start and from `restarts` seeded random starts and
/// keeps the best final value.
pub fn bilinear_restarts(
    t: &CostTensor,
    restarts: usize,
    seed: u64,
    max_iters: usize,
) -> Result<BilinearResult> {
    let n = t.n();
    let id: Vec<usize> = (0..n).collect();
    let mut best = bilinear_heuristic(t, &id, &id, max_iters, Direction::Minimize)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..restarts {
        let mut y = id.clone();
        let mut z = id.clone();
        y.shuffle(&mut rng);
        z.shuffle(&mut rng);
        let r = bilinear_heuristic(t, &y, &z, max_iters, Direction::Minimize)?;
        if r.pair.value < best.pair.value {
            best = r;
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_one() {
        let t = CostTensor::generate(1, 3, 0).unwrap();
        assert_eq!(
            bilinear_step_y(&t, &[0], Direction::Minimize).unwrap(),
            vec![0]
        );
        assert_eq!(
            bilinear_step_z(&t, &[0], Direction::Minimize).unwrap(),
            vec![0]
        );
    }

    #[test]
    fn diagonal_zero_is_fixpoint() {
        let n = 5;
        let mut v = vec![1.0; n * n * n];
        for i in 0..n {
            v[(i * n + i) * n + i] = 0.0;
        }
        let t = CostTensor::from_values(n, 3, v).unwrap();
        let id: Vec<usize> = (0..n).collect();
        let r = bilinear_heuristic(&t, &id, &id, 10, Direction::Minimize).unwrap();
        assert!(r.converged);
        assert_eq!(r.pair.value, 0.0);
        assert_eq!(r.trace, vec![0.0, 0.0]);
    }

    #[test]
    fn rejects_bad_starts() {
        let t = CostTensor::generate(3, 3, 0).unwrap();
        assert!(bilinear_heuristic(&t, &[0, 0, 1], &[0, 1, 2], 5, Direction::Minimize).is_err());
        assert!(bilinear_heuristic(&t, &[0, 1], &[0, 1, 2], 5, Direction::Minimize).is_err());
        assert!(bilinear_heuristic(&t, &[0, 1, 2], &[0, 1, 2], 0, Direction::Minimize).is_err());
    }

    #[test]
    fn maximize_goes_up() {
        let t = CostTensor::generate(6, 3, 3).unwrap();
        let id: Vec<usize> = (0..6).collect();
        let r = bilinear_heuristic(&t, &id, &id, 50, Direction::Maximize).unwrap();
        assert!(r.trace.windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn restarts_never_worse_than_identity() {
        let t = CostTensor::generate(8, 3, 12).unwrap();
        let id: Vec<usize> = (0..8).collect();
        let single = bilinear_heuristic(&t, &id, &id, 100, Direction::Minimize).unwrap();
        let multi = bilinear_restarts(&t, 5, 1, 100).unwrap();
        assert!(multi.pair.value <= single.pair.value);
    }
}
