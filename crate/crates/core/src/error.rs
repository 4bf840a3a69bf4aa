use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid tree: {0}")]
    InvalidTree(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("vertex budget exceeded: more than {cap} vertices requested")]
    VertexBudget { cap: usize },

    #[error("resource cap exceeded: {0}")]
    ResourceCap(String),

    #[error("unsupported case: {0}")]
    Unsupported(String),

    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

/// Coarse classification used for process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Config,
    Resource,
    Unsupported,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::VertexBudget { .. } | Error::ResourceCap(_) => ErrorKind::Resource,
            Error::Unsupported(_) => ErrorKind::Unsupported,
            _ => ErrorKind::Config,
        }
    }

    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
