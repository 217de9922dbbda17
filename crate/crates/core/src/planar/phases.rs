use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::oracle::exact_planar;
use super::schedule::{make_schedule, RoundSchedule, MIN_SCHEDULE_N};
use super::state::PartialAssignment;
use super::topdown::find_topdown_move;
use super::tree::{apply_tree, find_augmenting_tree, AugmentingTree, SearchConfig};
use crate::error::{invalid, Result};
use crate::instance::{CostTensor, Triple};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// No refresh; thresholds are cumulative budgets on the original costs.
    #[default]
    Empirical,
    /// Memoryless refresh at every round start and before every final-phase
    /// addition; thresholds apply to refreshed costs.
    Refresh,
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::Empirical => "empirical",
            Mode::Refresh => "refresh",
        })
    }
}

impl std::str::FromStr for Mode {
    type Err = crate::error::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "empirical" => Ok(Mode::Empirical),
            "refresh" => Ok(Mode::Refresh),
            other => Err(invalid(format!("unknown mode {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlanarOptions {
    pub k: u32,
    pub mode: Mode,
    /// Threshold doublings allowed per augmentation before giving up.
    pub max_escalations: u32,
    pub search: SearchConfig,
    /// Option trials allowed per top-down move.
    pub final_budget: usize,
    /// With at most this many first coordinates unassigned, every one of them
    /// is tried as the root and the cheapest augmentation is applied.
    /// Otherwise the smallest unassigned index is the root.
    pub root_scan: usize,
    #[serde(skip)]
    pub deadline: Option<Instant>,
}

impl Default for PlanarOptions {
    fn default() -> Self {
        Self {
            k: 1,
            mode: Mode::Empirical,
            max_escalations: 10,
            search: SearchConfig::default(),
            final_budget: 200_000,
            root_scan: 16,
            deadline: None,
        }
    }
}

/// Per-phase bookkeeping. The bound cost of an added triple is its current
/// value at selection plus the ledger offset at that moment, an upper bound
/// on its pristine cost.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PhaseStats {
    pub bound_cost: f64,
    pub augmentations: usize,
    pub triples_added: usize,
    pub escalations: u32,
    pub threshold_violations: usize,
    /// Main phase: rounds started. Final phase: unused.
    pub rounds: usize,
    /// Gave up after exhausting escalations.
    pub aborted: bool,
}

/// Selection-time accounting for the current triple of each first coordinate.
#[derive(Debug, Clone)]
pub struct Accounting {
    value: Vec<f64>,
    offset: Vec<f64>,
}

impl Accounting {
    pub fn new(n: usize) -> Self {
        Self {
            value: vec![0.0; n],
            offset: vec![0.0; n],
        }
    }

    fn record(&mut self, t: Triple, value: f64, offset: f64) {
        self.value[t[0]] = value;
        self.offset[t[0]] = offset;
    }

    /// Sum of selection-time values over the triples of `state`.
    pub fn selection_cost(&self, state: &PartialAssignment) -> f64 {
        state.matched1().map(|i| self.value[i]).sum()
    }

    /// Sum of selection-time values plus offsets over the triples of `state`.
    pub fn bound_cost(&self, state: &PartialAssignment) -> f64 {
        state
            .matched1()
            .map(|i| self.value[i] + self.offset[i])
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanarRunReport {
    pub n: usize,
    pub k: u32,
    pub mode: Mode,
    pub triples: Vec<Triple>,
    pub complete: bool,
    /// `n < 8`: no schedule exists, the exact oracle answered instead.
    pub exact_fallback: bool,
    pub timed_out: bool,
    /// Objective on the pristine tensor.
    pub true_cost: f64,
    /// Greedy-phase cost `Z_1`.
    pub greedy_cost: f64,
    pub main: PhaseStats,
    pub final_phase: PhaseStats,
    /// Analyzed main-phase budget for the schedule.
    pub main_budget: f64,
    /// Selection-time values summed over the output triples.
    pub selection_cost: f64,
    /// Selection-time values plus offsets over the output triples.
    pub output_bound_cost: f64,
    /// Final ledger offset `W`.
    pub ledger_offset: f64,
    pub runtime_ms: u64,
}

impl PlanarRunReport {
    pub fn escalations(&self) -> u32 {
        self.main.escalations + self.final_phase.escalations
    }

    /// Bound costs of the greedy, main and final phases.
    pub fn phase_costs(&self) -> [f64; 3] {
        [
            self.greedy_cost,
            self.main.bound_cost,
            self.final_phase.bound_cost,
        ]
    }
}

fn past(deadline: Option<Instant>) -> bool {
    deadline.is_some_and(|d| Instant::now() >= d)
}

/// Assigns first coordinates `0..n1` in order, each to the cheapest current
/// entry among unused second and third values. Returns the assignment and
/// its cost `Z_1`.
pub fn greedy_phase(t: &CostTensor, sched: &RoundSchedule) -> (PartialAssignment, f64) {
    let n = t.n();
    let mut state = PartialAssignment::new(n);
    let mut free_j: Vec<usize> = (0..n).collect();
    let mut free_k: Vec<usize> = (0..n).collect();
    let mut cost = 0.0;
    for i in 0..sched.n1.min(n) {
        let plane = t.plane(i);
        let mut best = (f64::INFINITY, 0, 0);
        for (jp, &j) in free_j.iter().enumerate() {
            let row = &plane[j * n..(j + 1) * n];
            for (kp, &k) in free_k.iter().enumerate() {
                if row[k] < best.0 {
                    best = (row[k], jp, kp);
                }
            }
        }
        let (c, jp, kp) = best;
        let (j, k) = (free_j.remove(jp), free_k.remove(kp));
        state.insert([i, j, k]).expect("greedy picks unused values");
        cost += c;
    }
    (state, cost)
}

/// Net change of the current assignment cost if `tree` is applied.
pub fn net_change(t: &CostTensor, tree: &AugmentingTree) -> f64 {
    let added: f64 = tree.added_costs.iter().sum();
    let deleted: f64 = tree
        .deleted
        .iter()
        .map(|&[i, j, k]| t.value3(i, j, k))
        .sum();
    added - deleted
}

fn roots(state: &PartialAssignment, scan: usize) -> Vec<usize> {
    let free = state.unmatched1();
    if free.len() <= scan {
        free.iter().copied().collect()
    } else {
        free.first().copied().into_iter().collect()
    }
}

// Cheapest augmentation over `roots` found by `search`.
fn best_over_roots(
    t: &CostTensor,
    roots: &[usize],
    mut search: impl FnMut(usize) -> Option<AugmentingTree>,
) -> Option<AugmentingTree> {
    let mut best: Option<(f64, AugmentingTree)> = None;
    for &i in roots {
        if let Some(tree) = search(i) {
            let c = net_change(t, &tree);
            if best.as_ref().is_none_or(|(b, _)| c < *b) {
                best = Some((c, tree));
            }
        }
    }
    best.map(|(_, tree)| tree)
}

fn apply_with_accounting(
    state: &mut PartialAssignment,
    acct: &mut Accounting,
    stats: &mut PhaseStats,
    tree: &AugmentingTree,
    threshold: f64,
    offset: f64,
) -> Result<()> {
    apply_tree(state, tree)?;
    for (&tr, &c) in tree.added.iter().zip(&tree.added_costs) {
        if c > threshold {
            stats.threshold_violations += 1;
        }
        acct.record(tr, c, offset);
        stats.bound_cost += c + offset;
    }
    stats.augmentations += 1;
    stats.triples_added += tree.added.len();
    debug_assert!(state.check_invariants().is_ok());
    Ok(())
}

/// Bottom-up rounds. Round `t` refreshes with `w_{t-1}` (refresh mode) and
/// augments until `target(t)` first coordinates remain unassigned. A failed
/// search doubles the threshold up to `max_escalations` times; after that
/// the phase stops and leaves the rest to the final phase.
pub fn main_phase(
    state: &mut PartialAssignment,
    t: &mut CostTensor,
    acct: &mut Accounting,
    sched: &RoundSchedule,
    opts: &PlanarOptions,
) -> Result<PhaseStats> {
    let mut stats = PhaseStats::default();
    for round in 1..=sched.t0 {
        if past(opts.deadline) {
            break;
        }
        stats.rounds += 1;
        let base = match opts.mode {
            Mode::Refresh => {
                t.refresh(sched.w(round - 1))?;
                sched.w(round)
            }
            Mode::Empirical => sched.cum_w(round),
        };
        let target = sched.target(round);
        while state.unmatched1().len() > target {
            let roots = roots(state, opts.root_scan);
            let mut w = base;
            let mut tree = None;
            for attempt in 0..=opts.max_escalations {
                tree = best_over_roots(t, &roots, |i0| {
                    find_augmenting_tree(state, t, i0, w, sched.k, &opts.search)
                });
                if tree.is_some() || attempt == opts.max_escalations {
                    break;
                }
                stats.escalations += 1;
                w *= 2.0;
            }
            let Some(tree) = tree else {
                stats.aborted = true;
                return Ok(stats);
            };
            let offset = t.ledger().offset;
            apply_with_accounting(state, acct, &mut stats, &tree, w, offset)?;
            if past(opts.deadline) {
                return Ok(stats);
            }
        }
    }
    Ok(stats)
}

/// Adds the remaining first coordinates one at a time with top-down moves of
/// at most `k` displacement levels. Refresh mode refreshes with `wf` before
/// each addition; empirical mode uses `W_{t0} + wf` on the original costs.
pub fn final_phase(
    state: &mut PartialAssignment,
    t: &mut CostTensor,
    acct: &mut Accounting,
    sched: &RoundSchedule,
    opts: &PlanarOptions,
) -> Result<PhaseStats> {
    let mut stats = PhaseStats::default();
    while !state.unmatched1().is_empty() {
        if past(opts.deadline) {
            break;
        }
        let base = match opts.mode {
            Mode::Refresh => {
                t.refresh(sched.wf)?;
                sched.wf
            }
            Mode::Empirical => sched.cum_w(sched.t0) + sched.wf,
        };
        let roots = roots(state, opts.root_scan);
        let mut w = base;
        let mut mv = None;
        for attempt in 0..=opts.max_escalations {
            mv = best_over_roots(t, &roots, |i| {
                find_topdown_move(state, t, i, w, sched.k, opts.final_budget)
            });
            if mv.is_some() || attempt == opts.max_escalations {
                break;
            }
            stats.escalations += 1;
            w *= 2.0;
        }
        let Some(mv) = mv else {
            stats.aborted = true;
            break;
        };
        let offset = t.ledger().offset;
        apply_with_accounting(state, acct, &mut stats, &mv, w, offset)?;
    }
    Ok(stats)
}

/// Greedy phase, bottom-up main phase and top-down final phase. Instances
/// with `n < 8` have no schedule and are answered by [`exact_planar`].
/// Refresh mode works on a private copy of the tensor.
pub fn bdapta(t: &CostTensor, opts: &PlanarOptions) -> Result<PlanarRunReport> {
    t.require_dim(3)?;
    let start = Instant::now();
    let n = t.n();
    if n < MIN_SCHEDULE_N {
        let sol = exact_planar(t)?;
        return Ok(PlanarRunReport {
            n,
            k: opts.k,
            mode: opts.mode,
            complete: true,
            exact_fallback: true,
            timed_out: false,
            true_cost: sol.cost,
            greedy_cost: 0.0,
            main: PhaseStats::default(),
            final_phase: PhaseStats::default(),
            main_budget: 0.0,
            selection_cost: sol.cost,
            output_bound_cost: sol.cost,
            ledger_offset: 0.0,
            triples: sol.triples,
            runtime_ms: start.elapsed().as_millis() as u64,
        });
    }
    let sched = make_schedule(n, opts.k)?;
    // Pristine storage is shared; only refreshed values are private.
    let mut local = t.clone();
    let tensor = &mut local;

    let mut acct = Accounting::new(n);
    let (mut state, greedy_cost) = greedy_phase(tensor, &sched);
    for tr in state.triples() {
        acct.record(tr, tensor.value3(tr[0], tr[1], tr[2]), 0.0);
    }
    let main = main_phase(&mut state, tensor, &mut acct, &sched, opts)?;
    let final_stats = final_phase(&mut state, tensor, &mut acct, &sched, opts)?;
    state.check_invariants()?;

    let triples = state.triples();
    let true_cost = t.true_cost(&triples)?;
    Ok(PlanarRunReport {
        n,
        k: opts.k,
        mode: opts.mode,
        complete: state.is_complete(),
        exact_fallback: false,
        timed_out: !state.is_complete() && past(opts.deadline),
        true_cost,
        greedy_cost,
        main,
        final_phase: final_stats,
        main_budget: sched.main_phase_budget(),
        selection_cost: acct.selection_cost(&state),
        output_bound_cost: acct.bound_cost(&state),
        ledger_offset: tensor.ledger().offset,
        triples,
        runtime_ms: start.elapsed().as_millis() as u64,
    })
}
