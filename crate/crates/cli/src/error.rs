use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("input error: {0}")]
    Input(String),
    #[error("solver degenerate: {0}")]
    Degenerate(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// 0 success, 1 degenerate solver run, 2 bad input, 3 failed verification.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Degenerate(_) => 1,
            CliError::Input(_) | CliError::Io(_) => 2,
            CliError::Verification(_) => 3,
        }
    }
}

impl From<ellsum::Error> for CliError {
    fn from(e: ellsum::Error) -> Self {
        match e {
            ellsum::Error::Degenerate(m) => CliError::Degenerate(m),
            other => CliError::Input(other.to_string()),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
