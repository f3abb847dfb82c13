use thiserror::Error;

/// Errors raised by the numerical routines and the configuration layer.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// Bracketing or bisection failed to isolate a root.
    #[error("solver did not converge: {0}")]
    NonConvergence(String),
    /// A suite configuration could not be honoured.
    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
