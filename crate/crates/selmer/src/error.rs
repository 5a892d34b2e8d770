use thiserror::Error;

/// Errors shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Malformed or out-of-domain input.
    #[error("invalid input: {0}")]
    Input(String),
    /// A computation hit a precision or structural limit and refuses to guess.
    #[error("unresolved: {0}")]
    Unresolved(String),
    /// The request is well formed but outside what this crate implements.
    #[error("out of scope: {0}")]
    OutOfScope(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn input<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Input(msg.into()))
}

pub(crate) fn unresolved<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Unresolved(msg.into()))
}
