//! Library side of the `pqkant` binary: argument definitions, JSON config
//! overlay, resolved jobs and run manifests.

pub mod args;
pub mod config;
pub mod jobs;
pub mod manifest;

use std::path::PathBuf;

use pqkant::Error as CoreError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    /// 2 for invalid input, 3 for numerical non-convergence, 1 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(CoreError::Convergence { .. }) => 3,
            CliError::Core(_) | CliError::Usage(_) => 2,
            CliError::Io { .. } => 1,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> CliError {
        let path = path.into();
        move |source| CliError::Io { path, source }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
