use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A scalar input failed validation. The message names the offending field.
    #[error("{field} out of range: got {value}, need {requirement}")]
    InvalidParam {
        field: &'static str,
        value: f64,
        requirement: &'static str,
    },

    /// A function was evaluated outside its valid domain, or a mean outside its.
    #[error("domain error: {0}")]
    Domain(String),

    /// The adaptive integrator exhausted its evaluation budget.
    /// Carries the best available estimate and its error estimate.
    #[error("integrator did not converge after {evals} evaluations (best estimate {best:e}, error estimate {err_est:e})")]
    Convergence { best: f64, err_est: f64, evals: u64 },

    /// A Hoelder-type bound was requested at q = 1, where the conjugate
    /// exponent is undefined.
    #[error("unsupported exponent q = {q}: this bound requires q > 1")]
    UnsupportedExponent { q: f64 },

    /// Unknown registry key.
    #[error("unknown function id: {0:?}")]
    UnknownFunction(String),

    /// A sweep configuration failed validation.
    #[error("invalid sweep config: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
