use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("index {index} out of range {lo}..={hi}")]
    IndexOutOfRange { index: usize, lo: usize, hi: usize },

    #[error("qubit norm must be 1 (|q|^2 = {norm_sqr}); normalize the amplitudes explicitly")]
    QubitNotNormalized { norm_sqr: f64 },

    #[error("qubit must have {expected} components, got {got}")]
    QubitLength { expected: usize, got: usize },

    #[error("coin parameters violate |a|^2 + |b|^2 = 1 (got {norm_sqr})")]
    CoinNotUnitary { norm_sqr: f64 },

    #[error("coin parameter p must lie in (0, 1), got {0}")]
    CoinParameter(f64),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("unsupported dimension {0}")]
    UnsupportedDimension(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("pseudovelocity is undefined at t = 0")]
    ZeroTime,

    #[error("velocity {speed} is not below the speed of light {c}")]
    Superluminal { speed: f64, c: f64 },

    #[error("numerical convergence failure: {0}")]
    Convergence(String),

    #[error("grid resolution check failed: {0}")]
    GridResolution(String),

    #[error("periodic box precondition violated: {0}")]
    BoxPrecondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;
