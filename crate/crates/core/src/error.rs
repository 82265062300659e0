use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = KacError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum KacError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Both rates vanish, so the jump process never fires.
    #[error("no events: lambda = mu = 0 gives an infinite waiting time")]
    NoEvents,

    #[error("multi-index {0:?} has odd entries; only even sectors are assembled")]
    OddIndex(Vec<u32>),

    /// Two independent routes to the same spectral quantity disagree.
    #[error("assembly mismatch in {what}: expected {expected}, got {got} (tolerance {tolerance})")]
    AssemblyMismatch {
        what: String,
        expected: f64,
        got: f64,
        tolerance: f64,
    },

    #[error("ill-conditioned cooling fit: {0}")]
    IllConditionedFit(String),

    #[error("moment integration failed at t = {time}: {detail}")]
    IntegrationFailure { time: f64, detail: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("estimator unreliable: {samples} samples (need at least {required})")]
    EstimatorUnreliable { samples: usize, required: usize },

    #[error("density not normalized: mass = {mass}")]
    Normalization { mass: f64 },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl KacError {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        KacError::InvalidParameter(msg.into())
    }
}
