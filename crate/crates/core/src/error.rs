//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("every site of the box is hard-trapped; the operator has an empty active set")]
    FullyTrapped,

    #[error("eigensolver did not converge within {iterations} iterations (best value {best_value}, residual {residual})")]
    NotConverged {
        iterations: usize,
        best_value: f64,
        residual: f64,
    },

    #[error("requested {requested} eigenvalues but the operator has dimension {dimension}")]
    TooManyEigenvalues { requested: usize, dimension: usize },

    #[error("walk left the stored field at time {time:.6}; regenerate the field on a box of half-side at least {needed_half_side}")]
    WalkLeftBox { time: f64, needed_half_side: i64 },

    #[error("cutoff collar is too thin: eps * side = {collar:.3} sites, need at least 2")]
    CollarTooThin { collar: f64 },

    #[error("radial inverse-CDF tabulation did not converge to tolerance {tol}")]
    TabulationFailed { tol: f64 },

    #[error("value {value} is outside the domain: {reason}")]
    OutOfDomain { value: f64, reason: String },

    #[error("correlation layout violates its invariants: {0}")]
    LayoutViolation(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("malformed field file: {0}")]
    MalformedField(String),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
