use thiserror::Error;

/// Library-wide error type.
///
/// `Budget` is the only variant that maps to the CLI's resource exit code;
/// everything else is a domain error.
#[derive(Debug, Error)]
pub enum Error {
    /// Structural mismatch: incompatible rings, lengths, ranks, or ends.
    #[error("structure error: {0}")]
    Structure(String),
    /// Operation not defined for this input (wrong characteristic, rank, ...).
    #[error("unsupported: {0}")]
    Unsupported(String),
    /// A stated precondition of an operation was violated.
    #[error("precondition violated: {0}")]
    Precondition(String),
    /// Enumeration or storage budget exceeded.
    #[error("budget exceeded: {0}")]
    Budget(String),
    /// Malformed input document.
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn structure(msg: impl Into<String>) -> Self {
        Error::Structure(msg.into())
    }
    pub fn unsupported(msg: impl Into<String>) -> Self {
        Error::Unsupported(msg.into())
    }
    pub fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }
    pub fn budget(msg: impl Into<String>) -> Self {
        Error::Budget(msg.into())
    }
    pub fn parse(msg: impl Into<String>) -> Self {
        Error::Parse(msg.into())
    }
}
