use thiserror::Error;

/// Errors raised by the toolkit. Variants name the violated precondition.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid bounds on axis {axis}: {reason}")]
    InvalidBounds { axis: usize, reason: String },

    #[error("exponent must be positive, got {0}")]
    NonpositiveExponent(f64),

    #[error("exponent {0} is outside the supported range {1}")]
    UnsupportedExponent(f64, &'static str),

    #[error("k = {k} is out of range [1, {d}]")]
    KOutOfRange { k: usize, d: usize },

    #[error("dimension {d} exceeds the limit {max} for {what}")]
    DimensionTooLarge {
        d: usize,
        max: usize,
        what: &'static str,
    },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid phi: {0}")]
    InvalidPhi(String),

    #[error("sample is empty")]
    EmptySample,

    #[error("function is not finite at the evaluation point")]
    InfiniteValueAt,

    #[error("function must vanish at the origin, got {0}")]
    NonzeroAtOrigin(String),

    #[error("subset contains no grid node")]
    EmptySubset,

    #[error("subset does not contain the origin as a grid node")]
    ZeroNotInSubset,

    #[error("no candidate passed the membership test")]
    NoMemberFound,

    #[error("function is not 0-homogeneous at {point:?} with rho = {rho}")]
    NotZeroHomogeneous { point: Vec<f64>, rho: f64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
