use thiserror::Error;

/// Errors raised by the library. The CLI maps each variant onto an exit code.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("regime violation: {0}")]
    RegimeViolation(String),

    #[error("index {index} out of range 1..={len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("domain error in {func}: {msg}")]
    Domain { func: &'static str, msg: String },

    #[error("size error: {0}")]
    Size(String),

    #[error("kind error: {0}")]
    Kind(String),

    #[error("not covered: {0}")]
    NotCovered(String),

    #[error("zero vector has no defined ratio")]
    ZeroVector,

    #[error("divergent series: {0}")]
    DivergentSeries(String),

    #[error("unknown inequality `{0}`")]
    UnknownInequality(String),

    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("invalid vector: {0}")]
    InvalidVector(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn domain(func: &'static str, msg: impl Into<String>) -> Self {
        Error::Domain {
            func,
            msg: msg.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
