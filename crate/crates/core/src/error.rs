use thiserror::Error;

/// Errors raised by estimators, validators and the simulation harness.
#[derive(Debug, Error)]
pub enum CopulaError {
    #[error("column {column} contains tied values")]
    TiesPresent { column: usize },

    #[error("non-finite value at row {row}, column {column}")]
    NonFiniteInput { row: usize, column: usize },

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("rank column {column} is not a permutation of 1..n (unresolved ties)")]
    TiedRanks { column: usize },

    #[error("degree m0 is undefined for model {model}: {reason}")]
    UndefinedBandwidth { model: String, reason: String },

    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, CopulaError>;

pub(crate) fn domain(msg: impl Into<String>) -> CopulaError {
    CopulaError::Domain(msg.into())
}
