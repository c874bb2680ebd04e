use thiserror::Error;

use witnesslab_core::Error as CoreError;

/// Failures of a command, each mapped to a process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("{0}")]
    Claim(String),

    #[error("{0}")]
    Solver(String),

    #[error("{0}")]
    Inapplicable(String),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Claim(_) => 1,
            CliError::Solver(_) => 2,
            CliError::Usage(_) | CliError::Io { .. } => 3,
            CliError::Inapplicable(_) => 4,
        }
    }

    pub fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        let msg = e.to_string();
        match e {
            CoreError::Solver(_) | CoreError::Verification { .. } => CliError::Solver(msg),
            CoreError::Inapplicable(_) | CoreError::NotPrime(_) | CoreError::NotCoprime(..) => {
                CliError::Inapplicable(msg)
            }
            CoreError::InvalidModulus(..) | CoreError::OutOfRange { .. } | CoreError::NotDivisor(..) => {
                CliError::Usage(msg)
            }
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
