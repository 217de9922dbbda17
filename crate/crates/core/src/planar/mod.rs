//! Planar 3-dimensional assignment: choose `n` triples `(i, pi(i), sigma(i))`
//! using every value of every axis exactly once.
//!
//! The heuristic runs in three phases. A greedy phase assigns most first
//! coordinates one at a time. A main phase of rounds adds the rest through
//! bottom-up alternating-path trees under per-round cost thresholds. A final
//! phase places the last few coordinates with top-down moves.

mod oracle;
mod phases;
mod schedule;
mod state;
mod topdown;
mod tree;

pub use oracle::{
    brute_force_planar, exact_planar, is_complete_planar, lower_bound_rowmin,
    lower_bound_rowmin_streaming, PlanarSolution, BRUTE_PLANAR_MAX_N, EXACT_PLANAR_MAX_N,
};
pub use phases::{
    bdapta, final_phase, greedy_phase, main_phase, net_change, Accounting, Mode, PhaseStats,
    PlanarOptions, PlanarRunReport,
};
pub use schedule::{
    candidate_targets, make_schedule, theta, RoundSchedule, FINAL_PHASE_CONSTANT, MAX_DEPTH_K,
    MIN_SCHEDULE_N,
};
pub use state::PartialAssignment;
pub use topdown::find_topdown_move;
pub use tree::{apply_tree, find_augmenting_tree, AugmentingTree, SearchConfig};
