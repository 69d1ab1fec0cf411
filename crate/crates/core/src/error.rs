use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parameter `{field}` out of range ({value}): {reason}")]
    OutOfRange {
        field: &'static str,
        value: f64,
        reason: String,
    },

    #[error("duplicate radius {0} in samples")]
    DuplicateRadius(f64),

    #[error("non-finite value at radius {0}")]
    NonFiniteValue(f64),

    #[error("at least {required} samples are needed, got {got}")]
    TooFewSamples { required: usize, got: usize },

    /// Adaptive quadrature exhausted its subdivision budget. The best
    /// estimate and its error bound are carried along.
    #[error("quadrature did not converge: estimate {estimate} with error bound {error_bound}")]
    NoConvergence { estimate: f64, error_bound: f64 },

    #[error("function is not in L_alpha: tail exponent {sigma} must exceed -{alpha}")]
    NotInLalpha { sigma: f64, alpha: f64 },

    #[error("grid spacing {spacing} near r = {radius} is too coarse for a second-difference estimate")]
    ResolutionTooCoarse { radius: f64, spacing: f64 },

    #[error("kernel is singular: {0}")]
    Singular(String),

    #[error("divergent tail: exponent {sigma} must exceed {required}")]
    DivergentTail { sigma: f64, required: f64 },

    #[error("point |x| = {x} lies outside the ball of radius {radius}")]
    XOutsideBall { x: f64, radius: f64 },

    #[error("decay exponents need pq > 1, got pq = {0}")]
    PqNotSupercritical(f64),

    #[error("non-positive value {value} at r = {radius} inside the fit window")]
    NonPositiveValues { radius: f64, value: f64 },

    #[error("operation requires subcritical order (2k+alpha < n and 2l+beta < n)")]
    NotSubcritical,

    #[error("invalid bump profile: {0}")]
    BumpInvalid(String),

    #[error("Riesz convolution diverges: source tail exponent {sigma} must exceed {required}")]
    DivergentConvolution { sigma: f64, required: f64 },

    #[error("window ({lo}, {hi}) is invalid: {reason}")]
    BadWindow { lo: f64, hi: f64, reason: String },

    #[error("i/o error: {0}")]
    Io(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn out_of_range(field: &'static str, value: f64, reason: impl Into<String>) -> Self {
        Error::OutOfRange {
            field,
            value,
            reason: reason.into(),
        }
    }

    /// Best available estimate carried by a non-convergence error.
    pub fn estimate(&self) -> Option<f64> {
        match self {
            Error::NoConvergence { estimate, .. } => Some(*estimate),
            _ => None,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
