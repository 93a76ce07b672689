use thiserror::Error;

use crate::model::ModelKind;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("state ({x}, {y}) is not reachable under {kind}")]
    InvalidState { kind: ModelKind, x: i64, y: i64 },

    #[error("alpha = {0} is outside the accepted range (0, 4]")]
    InvalidAlpha(f64),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("{what}: no certified convergence after {terms} terms (remainder bound {bound:e})")]
    NonConvergent {
        what: &'static str,
        terms: u64,
        bound: f64,
    },

    #[error("series diverges: {0}")]
    Divergent(String),

    #[error("empirical distribution is empty")]
    Empty,

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("oracle rejected: inter-arrival tail mass {0:e} exceeds 1e-3")]
    OracleRejected(f64),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("unknown verification target `{0}` (see list-targets)")]
    UnknownTarget(String),

    #[error("under-powered configuration for `{target}`: {what} = {got}, need at least {need}")]
    UnderPowered {
        target: String,
        what: &'static str,
        got: u64,
        need: u64,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Errors caused by the caller's configuration rather than by a run.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::Config(_)
                | Error::UnknownTarget(_)
                | Error::UnderPowered { .. }
                | Error::InvalidAlpha(_)
                | Error::InvalidState { .. }
                | Error::Precondition(_)
                | Error::Json(_)
        )
    }
}
