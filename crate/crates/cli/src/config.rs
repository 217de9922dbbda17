use std::fmt;
use std::str::FromStr;

use assign3d::planar::{Mode, MIN_SCHEDULE_N};
use assign3d::{CostTensor, Error};
use serde::{Deserialize, Serialize};

/// Largest dimension the streaming bound accepts.
pub const MAX_BOUNDS_D: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Solver {
    Axial,
    Planar,
    Bilinear,
}

impl Solver {
    pub fn name(self) -> &'static str {
        match self {
            Solver::Axial => "axial",
            Solver::Planar => "planar",
            Solver::Bilinear => "bilinear",
        }
    }

    /// Largest `n` the exact oracle for this solver accepts.
    pub fn oracle_max_n(self) -> usize {
        match self {
            Solver::Axial => assign3d::axial::EXACT_AXIAL_MAX_N,
            Solver::Planar | Solver::Bilinear => assign3d::planar::EXACT_PLANAR_MAX_N,
        }
    }
}

impl fmt::Display for Solver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Solver {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "axial" => Ok(Solver::Axial),
            "planar" => Ok(Solver::Planar),
            "bilinear" => Ok(Solver::Bilinear),
            other => Err(format!(
                "unknown solver {other:?} (expected axial, planar or bilinear)"
            )),
        }
    }
}

/// What a run computes. `Solve` covers both the `solve-*` commands and
/// `sweep`, which differ only in how they are invoked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "solver", rename_all = "lowercase")]
pub enum Task {
    Solve(Solver),
    Oracle(Solver),
    Bounds,
}

impl Task {
    /// Value of the `command` CSV column.
    pub fn label(self) -> String {
        match self {
            Task::Solve(s) => format!("solve-{s}"),
            Task::Oracle(s) => format!("oracle:{s}"),
            Task::Bounds => "bounds".to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub task: Task,
    pub n_list: Vec<usize>,
    pub d: usize,
    pub k: u32,
    pub reps: u64,
    pub base_seed: u64,
    pub mode: Mode,
    pub max_escalations: u32,
    /// Random restarts on top of the identity start (bilinear only).
    pub restarts: usize,
    /// Sweep cap for the bilinear heuristic.
    pub max_iters: usize,
    pub time_guard_secs: Option<f64>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            task: Task::Solve(Solver::Planar),
            n_list: Vec::new(),
            d: 3,
            k: 1,
            reps: 1,
            base_seed: 0,
            mode: Mode::Empirical,
            max_escalations: 10,
            restarts: 0,
            max_iters: 100,
            time_guard_secs: None,
        }
    }
}

impl ExperimentConfig {
    /// Rejects configurations that cannot run; the message is meant for the
    /// command line.
    pub fn validate(&self) -> Result<(), String> {
        if self.n_list.is_empty() {
            return Err("at least one --n is required".into());
        }
        if self.reps == 0 {
            return Err("--reps must be at least 1".into());
        }
        if self.n_list.contains(&0) {
            return Err("--n values must be positive".into());
        }
        if self.base_seed.checked_add(self.reps - 1).is_none() {
            return Err("--seed + --reps overflows 64 bits".into());
        }
        if let Some(g) = self.time_guard_secs {
            if !(g > 0.0 && g.is_finite()) {
                return Err("--time-guard must be a positive number of seconds".into());
            }
        }
        match self.task {
            Task::Bounds => {
                if !(2..=MAX_BOUNDS_D).contains(&self.d) {
                    return Err(format!(
                        "bounds needs 2 <= --d <= {MAX_BOUNDS_D}, got {}",
                        self.d
                    ));
                }
            }
            Task::Solve(_) | Task::Oracle(_) => {
                if self.d != 3 {
                    return Err(format!("solvers need --d 3, got {}", self.d));
                }
            }
        }
        if let Task::Oracle(s) = self.task {
            if let Some(&n) = self.n_list.iter().find(|&&n| n > s.oracle_max_n()) {
                return Err(format!(
                    "the {s} oracle needs n <= {}, got {n}",
                    s.oracle_max_n()
                ));
            }
        }
        if matches!(
            self.task,
            Task::Solve(Solver::Planar) | Task::Oracle(Solver::Planar)
        ) && !(1..=assign3d::planar::MAX_DEPTH_K).contains(&self.k)
        {
            return Err(format!(
                "--k must lie in 1..={}",
                assign3d::planar::MAX_DEPTH_K
            ));
        }
        if self.max_iters == 0 {
            return Err("--max-iters must be at least 1".into());
        }
        for &n in &self.n_list {
            if let Err(e @ Error::InstanceTooLarge { .. }) =
                assign3d::instance::checked_len(n, self.d)
            {
                return Err(e.to_string());
            }
        }
        Ok(())
    }

    pub fn seeds(&self) -> impl Iterator<Item = u64> + '_ {
        (0..self.reps).map(|r| self.base_seed + r)
    }

    /// Whether planar runs at this `n` go straight to the exact oracle.
    pub fn planar_exact_fallback(n: usize) -> bool {
        n < MIN_SCHEDULE_N
    }

    pub(crate) fn tensor(&self, n: usize, seed: u64) -> assign3d::Result<CostTensor> {
        CostTensor::generate(n, self.d, seed)
    }
}
