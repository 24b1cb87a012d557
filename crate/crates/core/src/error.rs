use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unsupported Hermite-Gauss order {order} (maximum is {max})")]
    UnsupportedOrder { order: usize, max: usize },

    #[error("incompatible grids: {0}")]
    IncompatibleGrid(String),

    #[error("spectrum does not cover the requested range [{lo:.6}, {hi:.6}] rad/fs (covered: [{covered_lo:.6}, {covered_hi:.6}])")]
    Coverage { lo: f64, hi: f64, covered_lo: f64, covered_hi: f64 },

    #[error("basis mismatch: {leakage:.4} of the weight lies outside the truncated basis")]
    BasisMismatch { leakage: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("mode is not normalized (norm {norm:.3e})")]
    NonUnitMode { norm: f64 },

    #[error("unsupported dimension {0}: mutually unbiased bases are built for prime dimensions only")]
    UnsupportedDimension(usize),

    #[error("ill-posed reconstruction: projectors span {rank} of the {required} required operator dimensions")]
    IllPosed { rank: usize, required: usize },

    #[error("unsupported export: {0}")]
    UnsupportedFormat(String),

    #[error("serialization failed: {0}")]
    Serialization(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
