use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("{path}: {source}")]
    Parse {
        path: String,
        source: algpath::Error,
    },

    #[error(transparent)]
    Core(#[from] algpath::Error),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Parse { .. } => 2,
            CliError::Core(
                algpath::Error::Json(_)
                | algpath::Error::DimensionMismatch { .. }
                | algpath::Error::InvalidArgument(_)
                | algpath::Error::EmptySystem
                | algpath::Error::NotParametric,
            ) => 2,
            CliError::Core(_) => 1,
            CliError::Io { .. } => 3,
        }
    }

    pub fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> CliError {
        let path = path.into();
        move |source| CliError::Io { path, source }
    }
}

pub type CliResult<T> = Result<T, CliError>;
