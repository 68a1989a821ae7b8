use cacheveil_core::Error as CoreError;
use thiserror::Error;

/// Exit code 2.
pub const EXIT_VALIDATION: i32 = 2;
/// Exit code 3.
pub const EXIT_INFEASIBLE: i32 = 3;
/// Exit code 4.
pub const EXIT_CAP: i32 = 4;
/// Exit code 1: I/O and internal failures.
pub const EXIT_INTERNAL: i32 = 1;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Infeasible(String),
    #[error("{0}")]
    CapExceeded(String),
    #[error("{0}")]
    Internal(String),
    #[error(transparent)]
    Io(#[from] anyhow::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => EXIT_VALIDATION,
            CliError::Infeasible(_) => EXIT_INFEASIBLE,
            CliError::CapExceeded(_) => EXIT_CAP,
            CliError::Internal(_) | CliError::Io(_) => EXIT_INTERNAL,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::CapExceeded { .. } => CliError::CapExceeded(e.to_string()),
            CoreError::Verification(_) => CliError::Internal(format!("internal error: {e}")),
            CoreError::UnreachableTarget { .. } => CliError::Infeasible(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.into())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.into())
    }
}
