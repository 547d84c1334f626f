use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed or inconsistent caller data.
    #[error("input error: {0}")]
    Input(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("group mismatch: expected {expected}, found {found}")]
    GroupMismatch { expected: String, found: String },

    /// A matrix or quaternion that has no inverse at the configured tolerance.
    #[error("singular element: {0}")]
    Singular(String),

    /// Numerical drift or an internal invariant that failed to hold.
    #[error("internal consistency: {0}")]
    Consistency(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub(crate) fn unsupported(msg: impl Into<String>) -> Self {
        Error::Unsupported(msg.into())
    }

    pub(crate) fn consistency(msg: impl Into<String>) -> Self {
        Error::Consistency(msg.into())
    }
}
