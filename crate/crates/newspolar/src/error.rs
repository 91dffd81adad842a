use std::path::PathBuf;

/// Crate-wide error type.
///
/// The variants map onto process exit codes at the CLI boundary:
/// configuration errors exit 2, everything else exits 1.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Invalid configuration: bad hyperparameters, missing input paths,
    /// malformed config files, unusable CLI arguments.
    #[error("configuration error: {0}")]
    Config(String),

    /// Invalid data or an operation that cannot proceed on the given
    /// inputs (out-of-range score, empty partition, word not in vocabulary).
    #[error("{0}")]
    Domain(String),

    /// I/O failure with the offending path attached.
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code for this error class.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 2,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
