//! Experiment driver behind the `assign3d` binary: configuration, seeded
//! replicate runs, CSV rows, manifests and summaries.

pub mod config;
pub mod record;
pub mod run;
pub mod summarize;

pub use config::{ExperimentConfig, Solver, Task};
pub use record::{read_csv, write_csv, RunRecord, Status};
pub use run::{manifest_path, run, Manifest};
pub use summarize::{summarize, Summary};
