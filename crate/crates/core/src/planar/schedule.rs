use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Smallest side length a schedule is defined for.
pub const MIN_SCHEDULE_N: usize = 8;
/// Largest depth parameter accepted; trees have `2^{k+1} - 1` additions.
pub const MAX_DEPTH_K: u32 = 8;
/// Constant in the final-phase threshold `wf = K_f n^{-(1-theta)} (ln n)^theta`.
pub const FINAL_PHASE_CONSTANT: f64 = 2.0;

/// Round parameters of the tree-augmentation heuristic. Rounds are numbered
/// from 1; round `t` lowers the number of unassigned first coordinates from
/// `x(t)` to `target(t)` using triples of cost at most `w(t)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundSchedule {
    pub n: usize,
    pub k: u32,
    pub theta: f64,
    pub alpha: f64,
    pub beta: f64,
    /// Number of first coordinates assigned by the greedy phase.
    pub n1: usize,
    /// `xs[t - 1] = x_t`; holds `x_1 ..= x_{t0 + 1}` (just `x_1` when `t0 = 0`).
    pub xs: Vec<usize>,
    /// `ws[0] = w_0`, `ws[t] = w_t` for `1 <= t <= t0`.
    pub ws: Vec<f64>,
    /// Prefix sums of `ws`.
    pub cum_ws: Vec<f64>,
    pub t0: usize,
    pub wf: f64,
}

// Guards `ceil` against `powf` landing a hair above an exact integer.
fn ceil_tol(x: f64) -> usize {
    (x - 1e-9).ceil().max(0.0) as usize
}

/// `1 / (2^{k+1} - 1)`.
pub fn theta(k: u32) -> f64 {
    1.0 / ((1u64 << (k + 1)) - 1) as f64
}

pub fn make_schedule(n: usize, k: u32) -> Result<RoundSchedule> {
    if n < MIN_SCHEDULE_N {
        return Err(invalid(format!(
            "schedules need n >= {MIN_SCHEDULE_N}, got {n}"
        )));
    }
    if k == 0 || k > MAX_DEPTH_K {
        return Err(invalid(format!(
            "depth parameter k must lie in 1..={MAX_DEPTH_K}, got {k}"
        )));
    }
    let nf = n as f64;
    let ln_n = nf.ln();
    let theta = theta(k);
    let alpha = 2f64.powi(-2 * k as i32 - 2) * (1.0 - (2.0f64 / 3.0).sqrt());
    let beta = 1.0 - alpha;
    let n1 = n - ceil_tol(nf.powf(1.0 - theta)).min(n);
    let x1 = n - n1;
    let leaves = 1usize << k;

    let mut xs = vec![x1];
    if x1 >= leaves {
        let mut t = 1;
        loop {
            let next = ceil_tol(beta.powi(t) * x1 as f64);
            xs.push(next);
            if next < leaves {
                break;
            }
            t += 1;
        }
    }
    let t0 = if x1 >= leaves { xs.len() - 1 } else { 0 };

    let mut ws = vec![2.0 * nf.powf(-2.0 * (1.0 - theta)) * ln_n];
    for &x in &xs[..t0] {
        ws.push(2.0 * (x as f64).powf(-1.0 - theta) * nf.powf(theta - 1.0) * ln_n.powf(theta));
    }
    let cum_ws = ws
        .iter()
        .scan(0.0, |acc, w| {
            *acc += w;
            Some(*acc)
        })
        .collect();
    let wf = FINAL_PHASE_CONSTANT * nf.powf(theta - 1.0) * ln_n.powf(theta);

    Ok(RoundSchedule {
        n,
        k,
        theta,
        alpha,
        beta,
        n1,
        xs,
        ws,
        cum_ws,
        t0,
        wf,
    })
}

impl RoundSchedule {
    pub fn leaves(&self) -> usize {
        1 << self.k
    }

    /// Triples added per augmentation, `2^{k+1} - 1`.
    pub fn tree_additions(&self) -> usize {
        (1 << (self.k + 1)) - 1
    }

    pub fn x(&self, t: usize) -> usize {
        self.xs[t - 1]
    }

    pub fn w(&self, t: usize) -> f64 {
        self.ws[t]
    }

    pub fn cum_w(&self, t: usize) -> f64 {
        self.cum_ws[t]
    }

    /// Unassigned count round `t` aims for. Bottom-up trees need `2^k` free
    /// values per axis, so no round goes below `2^k - 1`.
    pub fn target(&self, t: usize) -> usize {
        let floor = self.leaves() - 1;
        self.xs.get(t).copied().unwrap_or(floor).max(floor)
    }

    /// `(2^{k+1} - 1) sum_t (x_t - target_t) W_t`, the real-cost budget of a
    /// main phase whose augmentations all stay within their round threshold.
    pub fn main_phase_budget(&self) -> f64 {
        let per_round: f64 = (1..=self.t0)
            .map(|t| (self.x(t) - self.target(t)) as f64 * self.cum_w(t))
            .sum();
        self.tree_additions() as f64 * per_round
    }

    /// Expected candidate-set sizes `nu_0 ..= nu_{k-1}` for a round with
    /// threshold `w` and `x` unassigned first coordinates:
    /// `nu_0 = w n x^2 / 2`, `nu_{l+1} = w n nu_l^2 / 2`.
    pub fn candidate_targets(&self, w: f64, x: usize) -> Vec<f64> {
        candidate_targets(self.n, self.k, w, x)
    }
}

/// `nu_0 ..= nu_{k-1}` with `nu_0 = w n x^2 / 2` and `nu_{l+1} = w n nu_l^2 / 2`.
pub fn candidate_targets(n: usize, k: u32, w: f64, x: usize) -> Vec<f64> {
    let half_wn = w * n as f64 / 2.0;
    let mut nu = half_wn * (x * x) as f64;
    let mut out = Vec::with_capacity(k as usize);
    for _ in 0..k {
        out.push(nu);
        nu = half_wn * nu * nu;
    }
    out
}
