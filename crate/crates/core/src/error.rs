use thiserror::Error;

/// Errors raised by the numerical and symbolic pipelines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("resonance: indicial factor vanishes at exponent {exponent} (step {step})")]
    Resonance { exponent: f64, step: usize },

    #[error("integration failure at tau = {tau:.6e}: step size collapsed to {step:.3e}")]
    IntegrationFailure { tau: f64, step: f64 },

    #[error("matching failure at T = {t_match}: condition estimate {condition:.3e} exceeds 1e12")]
    MatchingFailure { t_match: f64, condition: f64 },

    #[error("non-positive scattering solution u = {value:.6e} at tau = {tau:.6e}")]
    NonPositive { tau: f64, value: f64 },

    #[error("unsupported integral identity: {0}")]
    UnsupportedIntegral(String),

    #[error("series error: {0}")]
    Series(String),

    #[error("internal consistency violated: {0}")]
    Consistency(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
