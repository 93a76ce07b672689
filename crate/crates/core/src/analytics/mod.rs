//! Closed-form and exact quantities: constants, the law of the axis exit
//! time, the mean recurrence, the arcsine law, lazy-walk first passage, and
//! a renewal oracle for the ½-stable limit.

pub mod arcsine;
pub mod constants;
pub mod first_passage;
pub mod oracle;
pub mod recurrence;
pub mod rho;
pub mod theorem;

pub use arcsine::arcsine_cdf;
pub use constants::{constants, Constants};
pub use first_passage::{lazy_first_passage, lazy_survival_from_one, DiscreteDistribution};
pub use oracle::{stable_oracle_build, stable_oracle_cdf, InterArrival, StableLimitOracle};
pub use recurrence::{closed_form_v, mean_recurrence};
pub use rho::{rho_mean_asymptotic, rho_mean_exact, rho_moment_exact, rho_survival, SeriesValue};
pub use theorem::{theorem_left_tail, theorem_scaling, TailLimit};
