use thiserror::Error;

/// Failures raised by the numeric kernels.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("cannot parse `{0}` as a number")]
    Parse(String),
    #[error("non-finite value {0}")]
    NonFinite(String),
    #[error("zero polynomial has no roots")]
    ZeroPolynomial,
    #[error("root finder did not converge (residual {0:e})")]
    RootsNotConverged(f64),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("degenerate recurrence: all constant coefficients vanish")]
    DegenerateSpec,
    #[error("coefficient law undefined at k = {k}: {reason}")]
    Undefined { k: usize, reason: String },
    #[error("no certifiable tail bound: {0}")]
    NoCertifiableTail(String),
    #[error("sequence too short: need {needed}, have {have}")]
    TooShort { needed: usize, have: usize },
    #[error("no bounded recurrence fits at k = {0}: {1} preceding zeros, nonzero term")]
    NoFit(usize, usize),
    #[error("growth bound violated at k = {0}")]
    GrowthViolation(usize),
    #[error("all-zero sequence")]
    AllZero,
    #[error("zero within {distance:e} of the contour |z| = {radius}")]
    NearContour { radius: f64, distance: f64 },
    #[error("rule is not summable on the requested circle")]
    NotSummable,
    #[error("size cap exceeded: {0}")]
    SizeCap(String),
}

pub type Result<T> = std::result::Result<T, Error>;
