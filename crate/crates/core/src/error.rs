use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("coefficient mode mismatch: {0}")]
    ModeMismatch(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("2 is not invertible in {0}")]
    TwoNotInvertible(String),
    #[error("parity mismatch: {0}")]
    ParityMismatch(String),
    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
