use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum LevyError {
    /// A parameter is outside its admissible range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    /// Malformed textual input (JSON, CSV, shorthand spec strings).
    #[error("parse error: {0}")]
    Parse(String),
    /// Two independent evaluation routes disagreed, or a solver failed its
    /// own optimality certificate.
    #[error("numerical integrity violation: {0}")]
    NumericalIntegrity(String),
    /// The requested operation is not available for this distribution.
    #[error("unsupported: {0}")]
    Unsupported(String),
    /// The brute-force grid would exceed the candidate cap.
    #[error("grid has {candidates} candidates, cap is {cap}")]
    CandidateCap { candidates: u128, cap: u128 },
}

pub type Result<T, E = LevyError> = std::result::Result<T, E>;

impl LevyError {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        LevyError::InvalidParameter(msg.into())
    }

    pub(crate) fn integrity(msg: impl Into<String>) -> Self {
        LevyError::NumericalIntegrity(msg.into())
    }

    pub(crate) fn unsupported(msg: impl Into<String>) -> Self {
        LevyError::Unsupported(msg.into())
    }
}
