use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("argument outside the domain: {0}")]
    Domain(String),

    #[error("quadrature did not converge (estimate {estimate:e}, error bound {error_bound:e})")]
    NotConverged { estimate: f64, error_bound: f64 },

    #[error("integral diverges: {0}")]
    Divergent(String),

    #[error("pole of the gamma function at {0}")]
    Pole(f64),

    #[error("profile construction failed: {0}")]
    Profile(String),

    #[error("iteration failed: {0}")]
    Iteration(String),

    #[error("config: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidParameter(msg.into()))
}

impl Error {
    /// Short stable tag used in report summaries.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidParameter(_) => "invalid-parameter",
            Error::Domain(_) => "domain",
            Error::NotConverged { .. } => "not-converged",
            Error::Divergent(_) => "divergent",
            Error::Pole(_) => "pole",
            Error::Profile(_) => "profile",
            Error::Iteration(_) => "iteration",
            Error::Config(_) => "config",
        }
    }
}
