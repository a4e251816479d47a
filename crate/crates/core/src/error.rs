use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// An argument is outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// The request exceeds a configured resource bound.
    #[error("resource bound exceeded: {0}")]
    Resource(String),
    /// A product over a root set did not descend to integer coefficients.
    #[error("not Galois-stable: {0}")]
    NotGaloisStable(String),
    /// An exactness invariant failed (non-zero remainder, odd coefficient, ...).
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
