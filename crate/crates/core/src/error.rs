use thiserror::Error;

/// Errors produced anywhere in the forecasting stack.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument fell outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A record or parameter violated one of its invariants.
    #[error("invalid `{field}`: {message}")]
    Validation { field: String, message: String },

    /// Vector or series lengths did not line up.
    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// The SMO solver ran out of iterations.
    #[error("solver did not converge after {iterations} iterations (KKT violation {violation:e})")]
    Convergence { iterations: usize, violation: f64 },

    #[error("periodogram has no dominant period (all powers are zero)")]
    NoDominantPeriod,

    /// Malformed payload, CSV row or model file. `location` is a JSON path,
    /// a line number or a header key.
    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },

    /// A provider request failed. Collection loops skip the cycle and carry on.
    #[error("provider error: {0}")]
    Provider(String),

    #[error("hyperparameter search failed: {0}")]
    SearchFailed(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn validation(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Validation {
            field: field.into(),
            message: message.into(),
        }
    }

    pub(crate) fn parse(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            location: location.into(),
            message: message.into(),
        }
    }

    /// Whether retrying the operation later may succeed.
    pub fn is_retryable(&self) -> bool {
        matches!(self, Error::Provider(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
