use std::time::{Duration, Instant};

use assign3d::axial::{axial_lower_bound, dfm_bound, exact_axial, greedy_axial};
use assign3d::bilinear::bilinear_restarts;
use assign3d::planar::{
    bdapta, exact_planar, lower_bound_rowmin, lower_bound_rowmin_streaming, theta, PlanarOptions,
    PlanarRunReport,
};
use assign3d::{CostTensor, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{ExperimentConfig, Solver, Task};
use crate::record::{RunRecord, Status};

/// `2^k n^{-1+theta_k} ln n`, the planar cost envelope without its constant.
pub fn planar_envelope(n: usize, k: u32) -> f64 {
    let nf = n as f64;
    2f64.powi(k as i32) * nf.powf(theta(k) - 1.0) * nf.ln()
}

/// Outcome of one solver call, before it becomes a CSV row.
struct Solved {
    cost: f64,
    lower_bound: f64,
    reference_bound: Option<f64>,
    escalations: Option<u32>,
    converged: Option<bool>,
    status: Status,
    phase_costs: Option<[f64; 3]>,
}

fn planar_status(r: &PlanarRunReport) -> Status {
    if r.exact_fallback {
        Status::Exact
    } else if r.timed_out {
        Status::Timeout
    } else if !r.complete {
        Status::Degraded
    } else {
        Status::Ok
    }
}

fn planar(
    cfg: &ExperimentConfig,
    t: &CostTensor,
    deadline: Option<Instant>,
) -> Result<PlanarRunReport> {
    let opts = PlanarOptions {
        k: cfg.k,
        mode: cfg.mode,
        max_escalations: cfg.max_escalations,
        deadline,
        ..PlanarOptions::default()
    };
    bdapta(t, &opts)
}

fn solve(
    cfg: &ExperimentConfig,
    solver: Solver,
    t: &CostTensor,
    deadline: Option<Instant>,
) -> Result<Solved> {
    let n = t.n();
    Ok(match solver {
        Solver::Axial => Solved {
            cost: greedy_axial(t)?.total_cost,
            lower_bound: axial_lower_bound(t)?,
            reference_bound: Some(dfm_bound(n)),
            escalations: None,
            converged: None,
            status: Status::Ok,
            phase_costs: None,
        },
        Solver::Planar => {
            let r = planar(cfg, t, deadline)?;
            Solved {
                cost: r.true_cost,
                lower_bound: lower_bound_rowmin(t),
                reference_bound: Some(planar_envelope(n, cfg.k)),
                escalations: Some(r.escalations()),
                converged: None,
                status: planar_status(&r),
                phase_costs: (!r.exact_fallback).then(|| r.phase_costs()),
            }
        }
        Solver::Bilinear => {
            let r = bilinear_restarts(t, cfg.restarts, t.seed(), cfg.max_iters)?;
            Solved {
                cost: r.pair.value,
                lower_bound: lower_bound_rowmin(t),
                reference_bound: None,
                escalations: None,
                converged: Some(r.converged),
                status: Status::Ok,
                phase_costs: None,
            }
        }
    })
}

fn oracle(
    cfg: &ExperimentConfig,
    solver: Solver,
    t: &CostTensor,
    deadline: Option<Instant>,
) -> Result<Solved> {
    let mut s = solve(cfg, solver, t, deadline)?;
    s.reference_bound = Some(match solver {
        Solver::Axial => exact_axial(t)?.total_cost,
        Solver::Planar | Solver::Bilinear => exact_planar(t)?.cost,
    });
    Ok(s)
}

fn run_one(cfg: &ExperimentConfig, n: usize, seed: u64) -> Result<RunRecord> {
    let start = Instant::now();
    let guard = cfg.time_guard_secs.map(Duration::from_secs_f64);
    let deadline = guard.map(|g| start + g);
    let planar_like = matches!(
        cfg.task,
        Task::Solve(Solver::Planar) | Task::Oracle(Solver::Planar)
    );
    let mut rec = RunRecord {
        command: cfg.task.label(),
        n,
        d: cfg.d,
        k: planar_like.then_some(cfg.k),
        seed,
        mode: planar_like.then(|| cfg.mode.to_string()),
        cost: None,
        lower_bound: None,
        reference_bound: None,
        escalations: None,
        converged: None,
        status: Status::Ok,
        runtime_ms: 0,
        phase_costs: None,
    };
    let solved = match cfg.task {
        Task::Bounds => {
            rec.lower_bound = Some(lower_bound_rowmin_streaming(n, cfg.d, seed)?);
            None
        }
        Task::Solve(s) => Some(solve(cfg, s, &cfg.tensor(n, seed)?, deadline)?),
        Task::Oracle(s) => Some(oracle(cfg, s, &cfg.tensor(n, seed)?, deadline)?),
    };
    if let Some(s) = solved {
        rec.cost = Some(s.cost);
        rec.lower_bound = Some(s.lower_bound);
        rec.reference_bound = s.reference_bound;
        rec.escalations = s.escalations;
        rec.converged = s.converged;
        rec.status = s.status;
        rec.phase_costs = s.phase_costs;
    }
    let elapsed = start.elapsed();
    // Only the planar heuristic stops early; other runs are flagged afterwards.
    if guard.is_some_and(|g| elapsed > g) && rec.status.is_complete() && rec.status != Status::Exact
    {
        rec.status = Status::Timeout;
    }
    rec.runtime_ms = elapsed.as_millis() as u64;
    Ok(rec)
}

/// Runs every `(n, seed)` pair of the configuration, in parallel, and
/// returns the rows ordered by `n` then seed.
pub fn run(cfg: &ExperimentConfig) -> Result<Vec<RunRecord>> {
    let mut ns = cfg.n_list.clone();
    ns.sort_unstable();
    ns.dedup();
    let jobs: Vec<(usize, u64)> = ns
        .iter()
        .flat_map(|&n| cfg.seeds().map(move |s| (n, s)))
        .collect();
    jobs.par_iter()
        .map(|&(n, seed)| run_one(cfg, n, seed))
        .collect()
}

/// Written next to the CSV so a run can be repeated exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub config: ExperimentConfig,
    pub rows: usize,
    pub wall_time_ms: u64,
}

impl Manifest {
    pub fn new(config: ExperimentConfig, rows: usize, wall_time: Duration) -> Self {
        Self {
            tool: "assign3d".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            config,
            rows,
            wall_time_ms: wall_time.as_millis() as u64,
        }
    }
}

/// `results.csv` -> `results.manifest.json`.
pub fn manifest_path(csv: &std::path::Path) -> std::path::PathBuf {
    csv.with_extension("manifest.json")
}
