use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("not a valid state: {0}")]
    NotAState(String),

    #[error("unsupported state class: {0}")]
    UnsupportedStateClass(String),

    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn not_a_state(msg: impl Into<String>) -> Self {
        Error::NotAState(msg.into())
    }

    /// True for failures that stem from the numerics rather than from the caller's input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NotAState(_) | Error::InternalInconsistency(_) | Error::UnsupportedStateClass(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
