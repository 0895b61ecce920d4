use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid Hilbert space: {0}")]
    InvalidSpace(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("space mismatch: {0:?} vs {1:?}")]
    SpaceMismatch(Vec<usize>, Vec<usize>),

    #[error("partial trace: {0}")]
    PartialTrace(String),

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("perturbative validity violated: {0}")]
    Perturbative(String),

    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),

    #[error("time {t} outside schedule [0, {end}]")]
    OutsideSchedule { t: f64, end: f64 },

    #[error("invalid DD sequence: {0}")]
    InvalidSequence(String),

    #[error("time step {dt} too large: must be <= {max}")]
    StepTooLarge { dt: f64, max: f64 },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("propagation failed at t = {t}: {source}")]
    Propagation { t: f64, source: Box<Error> },
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name, reason: reason.into() }
    }
}
