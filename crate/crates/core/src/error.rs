use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid code parameters: {0}")]
    InvalidParameters(String),

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("index {index} out of range (limit {limit})")]
    IndexOutOfRange { index: usize, limit: usize },

    #[error("enumeration of {0} would exceed the size guard")]
    SizeGuard(String),

    #[error("variable {0} is already conditioned")]
    AlreadyConditioned(usize),

    #[error("variable {0} is not conditioned")]
    NotConditioned(usize),

    #[error("graph contains a cycle")]
    CyclicGraph,

    #[error("{0}")]
    Unsupported(String),

    #[error("no rounds to marginalize")]
    EmptyRounds,

    #[error("noise variance must be positive, got {0}")]
    InvalidVariance(f64),

    #[error("s-random construction failed for N={len}, s={spread} after {restarts} restarts")]
    InterleaverFailed {
        len: usize,
        spread: usize,
        restarts: usize,
    },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
