use thiserror::Error;

/// Failure modes shared by every computation in the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain where a formula is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// A value cannot be represented as a finite `f64`.
    #[error("range error: {0}")]
    Range(String),

    /// A quadrature did not reach its requested tolerance.
    #[error("accuracy error in {integral}: best estimate {estimate:e}, error estimate {error:e}")]
    Accuracy {
        integral: String,
        estimate: f64,
        error: f64,
    },

    /// Invalid parameters (constructor invariants, packet support, axis setup).
    #[error("validation error: {0}")]
    Validation(String),

    /// Two routes that must agree did not.
    #[error("consistency check `{check}` failed: deviation {deviation:e} exceeds {tolerance:e}")]
    Consistency {
        check: String,
        deviation: f64,
        tolerance: f64,
    },

    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

pub(crate) fn validation<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Validation(msg.into()))
}

impl Error {
    /// Prefix the integral named in an accuracy error; other variants pass through.
    pub fn labelled(self, name: &str) -> Self {
        match self {
            Error::Accuracy {
                integral,
                estimate,
                error,
            } => Error::Accuracy {
                integral: format!("{name} over {integral}"),
                estimate,
                error,
            },
            other => other,
        }
    }
}
