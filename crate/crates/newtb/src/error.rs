use thiserror::Error;

/// Everything that can go wrong in the library.
///
/// The CLI maps [`Error::Invariant`] to exit code 3 and every other variant
/// to exit code 2 (bad input).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("enumeration of {needed} elements exceeds the cap of {cap}")]
    Resource { needed: u128, cap: u64 },
    #[error("invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Invariant(_) => 3,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn parse_err(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

pub(crate) fn arg_err(msg: impl Into<String>) -> Error {
    Error::Argument(msg.into())
}

pub(crate) fn invariant(msg: impl Into<String>) -> Error {
    Error::Invariant(msg.into())
}
