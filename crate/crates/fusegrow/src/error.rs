use std::path::PathBuf;

/// Errors produced by the fusegrow library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("failed to read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("failed to write {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },

    /// Malformed or unsupported file contents.
    #[error("{path}: {reason}")]
    Format { path: PathBuf, reason: String },

    /// Calibration file rejected, with a line/field diagnostic.
    #[error("calibration {path}: line {line}, field {field}: {reason}")]
    Calibration {
        path: PathBuf,
        line: usize,
        field: usize,
        reason: String,
    },

    #[error("size mismatch: {0}")]
    SizeMismatch(String),

    /// Fewer than 3 distinct seed positions, or all positions collinear.
    #[error("triangulation is degenerate: {0}")]
    DegenerateTriangulation(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn format(path: impl Into<PathBuf>, reason: impl Into<String>) -> Self {
        Error::Format {
            path: path.into(),
            reason: reason.into(),
        }
    }
}
