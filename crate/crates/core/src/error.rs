use thiserror::Error;

/// Errors raised by the numerical kernels.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("non-finite value {value} at point {point:?}")]
    NonFinite { point: Vec<f64>, value: f64 },

    #[error("exponent p = {0} is below 1")]
    ExponentBelowOne(f64),

    #[error("invalid exponent field: {0}")]
    InvalidExponent(String),

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("2 - (1 - theta) p(x) <= 0 at x = {point:?} (p = {p}); need p+ < 2/(1 - theta) = {bound}")]
    TildePrecondition { point: Vec<f64>, p: f64, bound: f64 },

    #[error("range condition fails on the {side} side: {detail}")]
    RangeViolation { side: RangeSide, detail: String },

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("dilation t = {t} moves support radius {radius} beyond L/4 = {limit}")]
    Aliasing { t: f64, radius: f64, limit: f64 },

    #[error("dyadic piece j = {j} lies beyond the sampled frequencies (reach {reach})")]
    BeyondNyquist { j: u32, reach: f64 },

    #[error("insufficient samples: {0}")]
    Sampling(String),

    #[error("bisection failed: {0}")]
    Bracket(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error: {0}")]
    Parse(String),
}

/// Which side of a two-sided exponent range failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RangeSide {
    Lower,
    Upper,
}

impl std::fmt::Display for RangeSide {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RangeSide::Lower => f.write_str("lower"),
            RangeSide::Upper => f.write_str("upper"),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
