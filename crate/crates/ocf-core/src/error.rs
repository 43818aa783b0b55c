use std::path::PathBuf;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// Unparseable file content: bad magic, malformed header, bad number.
    #[error("format error in {path}: {msg}")]
    Format { path: PathBuf, msg: String },

    /// Structurally valid input whose dimensions do not agree.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// A parameter outside its documented range, or an infeasible request.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Input that is numerically degenerate for the requested operation
    /// (duplicate bands, all-constant cube, ...).
    #[error("degenerate input: {0}")]
    Degenerate(String),
}

impl Error {
    pub(crate) fn format(path: impl Into<PathBuf>, msg: impl Into<String>) -> Self {
        Error::Format {
            path: path.into(),
            msg: msg.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
