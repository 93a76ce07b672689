//! Batch runs with resumable result files, trajectory dumps, and the
//! registry of verification targets.

pub mod batch;
pub mod config;
pub mod trajectory;
pub mod verify;

pub use batch::{run_batch, run_batch_until, BatchOutcome, ResultRow};
pub use config::{resolve_threads, ExperimentConfig, Horizon, Overrides, THREADS_ENV};
pub use trajectory::trajectory_dump;
pub use verify::{list_targets, verify, Criterion, TargetInfo, VerdictReport};
