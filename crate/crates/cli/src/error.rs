use thiserror::Error;

/// Failures split by exit code: usage/configuration problems exit with 2,
/// runtime failures with 1.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Runtime(String),
}

impl From<biphoton::Error> for CliError {
    fn from(err: biphoton::Error) -> Self {
        CliError::Runtime(err.to_string())
    }
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }
}
