use std::path::PathBuf;

use thiserror::Error;

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const VERIFICATION: i32 = 1;
    pub const USAGE: i32 = 2;
    pub const BUDGET: i32 = 3;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {message}")]
    Config { path: String, message: String },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("{0}; lower --w-exhaustive / --confinement-w or raise MMCODES_BUDGET")]
    Budget(mmcodes::Error),
    #[error(transparent)]
    Core(mmcodes::Error),
}

impl From<mmcodes::Error> for CliError {
    fn from(e: mmcodes::Error) -> Self {
        use mmcodes::Error as E;
        match e {
            E::BudgetExceeded { .. } => CliError::Budget(e),
            E::NotCommuting(..) | E::NotAComplex(..) | E::Orthogonality(_) => CliError::Verification(e.to_string()),
            other => CliError::Core(other),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Verification(_) => exit::VERIFICATION,
            CliError::Budget(_) => exit::BUDGET,
            _ => exit::USAGE,
        }
    }

    pub fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> CliError {
        let path = path.into();
        move |source| CliError::Io { path, source }
    }
}

pub type CliResult<T> = Result<T, CliError>;
