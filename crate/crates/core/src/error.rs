use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parameter `{name}` = {value} is out of range: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error("power spectral density is negative ({value:e}) at omega = {omega}")]
    NegativePsd { omega: f64, value: f64 },
    #[error("autocorrelation series does not converge (tail {tail:e} after {lags} lags)")]
    SeriesDivergent { lags: usize, tail: f64 },
    #[error(
        "series value {series} and quadrature value {quadrature} disagree beyond {tolerance:e}"
    )]
    SeriesMismatch {
        series: f64,
        quadrature: f64,
        tolerance: f64,
    },
    #[error("matrix is not positive definite: {0}")]
    NotPositiveDefinite(String),
    #[error("optimizer did not converge after {iterations} iterations (best value {best})")]
    NonConvergence { iterations: usize, best: f64 },
    #[error("power constraint violated: {0}")]
    ConstraintViolation(String),
    #[error("spectral density tail is not integrable")]
    NonIntegrableTail,
    #[error("invalid input distribution: {0}")]
    InvalidDistribution(String),
    #[error("inconsistent custom model: {0}")]
    InconsistentModel(String),
}

pub(crate) fn check_param(
    name: &'static str,
    value: f64,
    ok: bool,
    reason: &'static str,
) -> Result<()> {
    if ok && value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason,
        })
    }
}
