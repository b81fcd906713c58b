use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("usage: {0}")]
    Usage(String),
    #[error("malformed manifest {path}: {reason}")]
    Malformed { path: PathBuf, reason: String },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("missing file: {}", .0.display())]
    Missing(PathBuf),
    #[error("numerical error: {0}")]
    Numeric(polymean_core::Error),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit status for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Usage(_) => 2,
            Error::Malformed { .. } => 3,
            Error::Dimension(_) => 4,
            Error::Missing(_) => 5,
            Error::Numeric(_) => 6,
            Error::Io { .. } => 1,
        }
    }

    pub(crate) fn malformed(path: &std::path::Path, reason: impl Into<String>) -> Self {
        Error::Malformed {
            path: path.to_path_buf(),
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        if source.kind() == std::io::ErrorKind::NotFound {
            Error::Missing(path.to_path_buf())
        } else {
            Error::Io {
                path: path.to_path_buf(),
                source,
            }
        }
    }
}

impl From<polymean_core::Error> for Error {
    fn from(e: polymean_core::Error) -> Self {
        use polymean_core::Error as E;
        match e {
            E::DimensionMismatch { .. } | E::DomainMismatch | E::ShapeMismatch { .. } => {
                Error::Dimension(e.to_string())
            }
            e => Error::Numeric(e),
        }
    }
}
