use thiserror::Error;

/// Errors produced anywhere in the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("label {label} out of range for K={k}")]
    LabelOutOfRange { label: usize, k: usize },

    #[error("node {node} out of range for n={n}")]
    NodeOutOfRange { node: usize, n: usize },

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("invalid parameters: {0}")]
    Validation(String),

    #[error("criterion undefined on empty graph")]
    EmptyGraph,

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("grid budget exceeded: {points} points (limit {limit})")]
    BudgetExceeded { points: u128, limit: u128 },

    #[error("mismatched delta: {0}")]
    MismatchedDelta(String),

    #[error("cannot read {path}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }
}
