use thiserror::Error;

use crate::expr::ParseError;

/// Errors raised by the numerical kernels.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid interval bounds [{lo}, {hi}]")]
    InvalidBounds { lo: f64, hi: f64 },

    #[error("division by an interval containing zero")]
    DivisionByZeroInterval,

    #[error("{func} is not defined on [{lo}, {hi}]")]
    Domain { func: &'static str, lo: f64, hi: f64 },

    #[error("shape mismatch: expected {expected}, found {found}")]
    Shape { expected: String, found: String },

    #[error("diagonal entry {index} contains zero")]
    SingularDiagonal { index: usize },

    #[error("matrix is numerically singular (pivot {pivot:e} below tolerance {tolerance:e})")]
    NumericallySingular { pivot: f64, tolerance: f64 },

    #[error("scaling vector must be strictly positive")]
    InvalidScaling,

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("cannot bisect a box of zero width")]
    DegenerateBox,

    #[error("extracted sub-matrix failed post-verification: {0}")]
    InternalCertification(String),

    #[error("no rank profile of positive rank could be certified")]
    ProfileUnavailable,

    #[error("profile does not match the function: {0}")]
    RankProfileMismatch(String),

    #[error("enclosure soundness violated: {0}")]
    SoundnessViolation(String),

    #[error(transparent)]
    Parse(#[from] ParseError),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn shape_err(expected: impl ToString, found: impl ToString) -> Error {
    Error::Shape {
        expected: expected.to_string(),
        found: found.to_string(),
    }
}
