use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Failure categories surfaced by the library. The harness maps each one to a
/// distinct process exit code.
#[derive(Debug, Error)]
pub enum Error {
    /// Shapes, hyperparameters or config files that cannot describe a valid run.
    #[error("configuration error: {0}")]
    Config(String),

    /// Input data that violates a dataset or file-format contract.
    #[error("data error: {0}")]
    Data(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// A forward pass produced NaN or infinity.
    #[error("numeric divergence: {0}")]
    Divergence(String),

    /// An internal numeric self-check (e.g. a gradient check) failed.
    #[error("numeric check failed: {0}")]
    NumericCheck(String),
}

impl Error {
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub fn data(msg: impl Into<String>) -> Self {
        Error::Data(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code: 1 configuration, 2 data or I/O, 3 numeric failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 1,
            Error::Data(_) | Error::Io { .. } => 2,
            Error::Divergence(_) | Error::NumericCheck(_) => 3,
        }
    }
}
