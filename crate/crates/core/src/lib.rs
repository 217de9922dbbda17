//! Solvers, bounds and exact oracles for random three-dimensional assignment
//! problems with i.i.d. Exp(1) costs.
//!
//! * [`instance`]: seeded cost tensors and the memoryless refresh.
//! * [`matching`]: exact 2D assignment, the building block for everything else.
//! * [`axial`]: plane-by-plane greedy for the axial problem and its bounds.
//! * [`planar`]: the bounded-depth alternating-path-tree heuristic for the
//!   planar problem, the row-minimum lower bound and exact oracles.
//! * [`bilinear`]: alternating minimization over the two permutation factors.

pub mod axial;
pub mod bilinear;
pub mod error;
pub mod instance;
pub mod matching;
pub mod perm;
pub mod planar;

pub use error::{Error, Result};
pub use instance::{CostTensor, RefreshLedger, Triple};
