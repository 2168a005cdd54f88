use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Rejected input: bad config file, bad flag value or infeasible request.
    #[error("invalid config: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("solver: {0}")]
    Solver(#[from] bama_core::Error),

    /// An experiment ran but one of its built-in checks did not hold.
    #[error("check failed: {0}")]
    CheckFailed(String),
}

impl Error {
    pub fn config(path: &str, err: bama_core::Error) -> Self {
        match err.field() {
            Some(field) => Error::Config(format!("{path}.{field}: {err}")),
            None => Error::Config(format!("{path}: {err}")),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// 2 for user errors, 1 for everything else.
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::Config(_) => 2,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
