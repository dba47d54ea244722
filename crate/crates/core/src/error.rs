use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the operation's domain.
    #[error("domain error: {0}")]
    Domain(String),
    /// The requested accuracy cannot be delivered, or an input carries too
    /// little precision for the computation.
    #[error("precision error: {0}")]
    Precision(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    /// A computed quantity contradicts an analytic bound it must satisfy.
    #[error("bound violation: {0}")]
    BoundViolation(String),
}

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

pub(crate) fn precision<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Precision(msg.into()))
}
