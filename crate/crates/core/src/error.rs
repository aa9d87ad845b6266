use thiserror::Error;

/// Errors raised by model construction, solvers and experiment drivers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("system too large for full-space construction: L = {size} (limit {limit})")]
    TooLarge { size: usize, limit: usize },

    #[error("eigensolver did not converge after {iterations} iterations (residual {residual:.3e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("degenerate ground state (gap {gap:.3e} below 1e-12)")]
    Degenerate { gap: f64 },

    #[error("no interior gap minimum in [{lo}, {hi}]: gap is monotone over the bracket")]
    MonotoneGap { lo: f64, hi: f64 },

    #[error("gap {gap:.3e} at s = {s} is too small to schedule")]
    GapTooSmall { s: f64, gap: f64 },

    #[error("overlap magnitude {0} exceeds one")]
    OverlapAboveOne(f64),

    #[error("matrix is not Hermitian (asymmetry {0:.3e})")]
    NotHermitian(f64),

    #[error("probabilities sum to {0}, expected 1")]
    ProbabilityMismatch(f64),

    #[error("norm drift {drift:.3e} exceeded tolerance at t = {t}")]
    NormDrift { t: f64, drift: f64 },

    #[error("trace drift {drift:.3e} exceeded tolerance at t = {t}")]
    TraceDrift { t: f64, drift: f64 },

    #[error("density matrix has eigenvalue {0:.3e} below -1e-6")]
    NegativeDensity(f64),

    #[error("fit needs at least 4 distinct sizes, got {0}")]
    TooFewPoints(usize),

    #[error("fit input contains non-positive value {value} at L = {size}")]
    NonPositive { size: f64, value: f64 },

    #[error("{0}")]
    Io(#[from] std::io::Error),

    #[error("{0}")]
    Json(#[from] serde_json::Error),

    #[error("{0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidModel(_) => "invalid-model",
            Error::InvalidArgument(_) => "invalid-argument",
            Error::TooLarge { .. } => "too-large",
            Error::NoConvergence { .. } => "no-convergence",
            Error::Degenerate { .. } => "degenerate",
            Error::MonotoneGap { .. } => "monotone-gap",
            Error::GapTooSmall { .. } => "gap-too-small",
            Error::OverlapAboveOne(_) => "overlap-above-one",
            Error::NotHermitian(_) => "not-hermitian",
            Error::ProbabilityMismatch(_) => "probability-mismatch",
            Error::NormDrift { .. } => "norm-drift",
            Error::TraceDrift { .. } => "trace-drift",
            Error::NegativeDensity(_) => "negative-density",
            Error::TooFewPoints(_) => "too-few-points",
            Error::NonPositive { .. } => "non-positive",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
            Error::Csv(_) => "csv",
        }
    }

    /// Whether the error comes from the request rather than the numerics.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::InvalidModel(_) | Error::InvalidArgument(_) | Error::TooLarge { .. } | Error::TooFewPoints(_) | Error::Json(_)
        )
    }
}
