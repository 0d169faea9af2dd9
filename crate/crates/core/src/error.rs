use thiserror::Error;

/// Errors raised by the lab.
#[derive(Debug, Error)]
pub enum LabError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The exhaustive greedy-set enumeration would exceed the configured family size.
    #[error("greedy-set enumeration overflow: {enumerated} sets enumerated before hitting the cap of {limit} (family needs {required})")]
    EnumerationOverflow {
        enumerated: usize,
        limit: usize,
        required: u128,
    },

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, LabError>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(LabError::InvalidArgument(msg.into()))
}
