use std::path::PathBuf;

use thiserror::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_REPORT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INCONCLUSIVE: i32 = 3;
pub const EXIT_PARSE: i32 = 4;
pub const EXIT_LENGTH: i32 = 5;
pub const EXIT_NON_FINITE: i32 = 6;
pub const EXIT_IO: i32 = 7;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),

    #[error("{path}: parse error at line {line}, column {column}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        column: usize,
        message: String,
    },

    #[error("{0}")]
    Length(String),

    #[error("{0}")]
    NonFinite(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Core(#[from] numrange::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Parse { .. } => EXIT_PARSE,
            CliError::Length(_) => EXIT_LENGTH,
            CliError::NonFinite(_) => EXIT_NON_FINITE,
            CliError::Io { .. } => EXIT_IO,
            CliError::Core(numrange::Error::InsufficientSampling { .. }) => EXIT_INCONCLUSIVE,
            CliError::Core(numrange::Error::Dimension(_)) => EXIT_LENGTH,
            CliError::Core(_) => EXIT_USAGE,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }
}

pub type CliResult<T> = Result<T, CliError>;
