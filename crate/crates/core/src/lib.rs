//! Simulation and verification of axis-driven random walks.
//!
//! The walks are simple random walks on the lattice that, once on an axis,
//! are pushed away from the origin: at distance `i` they leave the axis with
//! probability `1/(2 i^α)` and otherwise slide outward. For `0 < α < ½` the
//! dominant coordinate grows like `n^{1/(2(1−α))}`.
//!
//! * [`model`] and [`engine`]: kernels and seeded path simulation.
//! * [`excursion`]: online excursion skeleton and per-walk summaries.
//! * [`analytics`]: exact laws, asymptotics, and limit oracles.
//! * [`stats`]: empirical distributions and fits.
//! * [`harness`]: batch runs, result files, and the verification registry.

pub mod analytics;
pub mod engine;
pub mod error;
pub mod excursion;
pub mod harness;
pub mod model;
pub mod numeric;
pub mod rng;
pub mod stats;

pub use engine::{run_path, simulate_path, simulate_path_jump, Engine, PathObserver, PathOutcome};
pub use error::{Error, Result};
pub use excursion::{ExcursionRecord, ExcursionTracker, WalkSummary};
pub use model::{LatticeState, ModelKind, ModelSpec};
pub use rng::RngStream;
