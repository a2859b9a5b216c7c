use thiserror::Error;

/// Errors raised by samplers, premium formulas and verification checks.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A parameter lies outside its admissible range.
    #[error("invalid parameter: {0}")]
    Parameter(String),
    /// Matrix or vector dimensions do not conform.
    #[error("shape mismatch: {0}")]
    Shape(String),
    /// A matrix that must be inverted (or factored) is numerically singular.
    #[error("singular matrix: {0}")]
    Singular(String),
    /// The self-normalized Monte Carlo premium has (almost) no prior mass at the observation.
    #[error("degenerate denominator: only {effective} of {n} draws carry prior mass above 1e-300")]
    DegenerateDenominator { effective: usize, n: usize },
    /// Not enough exceedances above a threshold to estimate a tail ratio.
    #[error("insufficient tail data at t = {threshold}: {found} exceedances, need at least {needed}")]
    InsufficientTailData {
        threshold: f64,
        found: usize,
        needed: usize,
    },
    /// The model is outside the class a result is stated for.
    #[error("unsupported model: {0}")]
    UnsupportedModel(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn param(msg: impl Into<String>) -> Error {
    Error::Parameter(msg.into())
}

/// Fails unless `value` is finite and strictly positive.
pub(crate) fn ensure_positive(name: &str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(param(format!("{name} must be > 0, got {value}")))
    }
}

/// Element-wise [`ensure_positive`], naming the offending index.
pub(crate) fn ensure_all_positive(name: &str, values: &[f64]) -> Result<()> {
    if values.is_empty() {
        return Err(param(format!("{name} must be non-empty")));
    }
    for (i, &v) in values.iter().enumerate() {
        if !(v.is_finite() && v > 0.0) {
            return Err(param(format!("{name}[{i}] must be > 0")));
        }
    }
    Ok(())
}
