use thiserror::Error;

/// Errors raised by the dynamics and bound computations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SrsError {
    #[error("dimension mismatch: parameter has dimension {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("operation requires dimension {expected}, parameter has dimension {found}")]
    UnsupportedDimension { expected: usize, found: usize },

    #[error("integer overflow in exact arithmetic")]
    Overflow,

    #[error("empty cycle")]
    EmptyCycle,

    #[error("step budget must be at least 1")]
    ZeroBudget,

    #[error("certificate was built for a different parameter")]
    CertificateMismatch,

    #[error("parameter must be exact rational")]
    NotExact,

    #[error("cannot parse {0:?}")]
    Parse(String),
}

pub type Result<T, E = SrsError> = std::result::Result<T, E>;
