use std::path::Path;

use rcdensity::Error;

/// Failure of a command, carrying its process exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Unreadable or malformed input, bad arguments. Exit code 2.
    #[error("{0}")]
    Input(String),

    /// Annotation records that failed validation, all of them. Exit code 3.
    #[error("{} invalid record(s):\n{}", .0.len(), .0.iter().map(|e| format!("  {e}")).collect::<Vec<_>>().join("\n"))]
    Validation(Vec<String>),

    /// A broken internal invariant. Exit code 4.
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Validation(_) => 3,
            CliError::Internal(_) => 4,
        }
    }

    pub(crate) fn io(path: &Path, err: std::io::Error) -> Self {
        CliError::Input(format!("{}: {err}", path.display()))
    }

    /// Prefixes input errors with the file they came from.
    pub(crate) fn in_file(self, path: &Path) -> Self {
        match self {
            CliError::Input(m) => CliError::Input(format!("{}: {m}", path.display())),
            other => other,
        }
    }
}

impl From<Error> for CliError {
    fn from(err: Error) -> Self {
        match err {
            Error::Validation(records) => {
                CliError::Validation(records.iter().map(ToString::to_string).collect())
            }
            Error::ClauseTooShort(m) => CliError::Validation(vec![m]),
            Error::OutOfOrder { .. } | Error::Misaligned { .. } | Error::EmptySequence => {
                CliError::Internal(err.to_string())
            }
            other => CliError::Input(other.to_string()),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
