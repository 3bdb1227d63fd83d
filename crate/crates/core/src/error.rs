use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected n = {expected}, got n = {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("index {index} out of range (limit {limit})")]
    IndexOutOfRange { index: usize, limit: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("matrix is not skew-symmetric (asymmetry {asymmetry:e} relative to norm {norm:e})")]
    NotSkew { asymmetry: f64, norm: f64 },

    #[error("point is off the constraint set (|X|^2 - 1 = {radial:e}, <X,P> = {tangential:e})")]
    OffConstraint { radial: f64, tangential: f64 },

    #[error("integrator step {step} failed: {reason}")]
    StepFailure { step: usize, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
