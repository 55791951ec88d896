use thiserror::Error;

/// Errors raised by map construction, dynamics routines and searches.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Malformed input: bad descriptor, out-of-range parameter, unparsable rational.
    #[error("invalid input: {0}")]
    Invalid(String),
    /// A documented precondition of an operation does not hold.
    #[error("precondition failed: {0}")]
    Precondition(String),
    /// An iteration or size budget ran out before the computation settled.
    #[error("budget exhausted: {0}")]
    Budget(String),
    /// A numeric procedure failed to converge or lost precision.
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    pub(crate) fn budget(msg: impl Into<String>) -> Self {
        Error::Budget(msg.into())
    }

    pub(crate) fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
