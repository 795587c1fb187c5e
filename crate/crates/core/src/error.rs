use thiserror::Error;

/// Error type shared by every module of the crate.
///
/// The CLI maps `Input` and `Invalid` to exit code 2; `Unsupported` covers
/// models the exact-rank operations refuse (genus >= 2 components,
/// non-semistable curves), and `Bound` is returned when a brute-force search
/// would exceed its configured size limit.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("input error: {0}")]
    Input(String),
    #[error("invalid object: {0}")]
    Invalid(String),
    #[error("unsupported model: {0}")]
    Unsupported(String),
    #[error("bound exceeded: {0}")]
    Bound(String),
}

impl Error {
    pub fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }
    pub fn unsupported(msg: impl Into<String>) -> Self {
        Error::Unsupported(msg.into())
    }
    pub fn bound(msg: impl Into<String>) -> Self {
        Error::Bound(msg.into())
    }
}
