use std::fmt;

use reidkit::Error;

/// Process exit codes. Stable across releases.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitCode {
    Ok = 0,
    /// I/O failure or a failed check.
    Failure = 1,
    /// Invalid configuration or malformed input.
    InvalidInput = 2,
    NoValidQuery = 3,
    ExtractorFailed = 4,
}

impl ExitCode {
    pub fn code(self) -> i32 {
        self as i32
    }
}

#[derive(Debug)]
pub struct CliError {
    pub exit: ExitCode,
    pub message: String,
}

impl CliError {
    pub fn new(exit: ExitCode, message: impl Into<String>) -> Self {
        Self {
            exit,
            message: message.into(),
        }
    }

    pub fn invalid(message: impl Into<String>) -> Self {
        Self::new(ExitCode::InvalidInput, message)
    }

    pub fn io(message: impl Into<String>) -> Self {
        Self::new(ExitCode::Failure, message)
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let exit = match &e {
            Error::Io { .. } => ExitCode::Failure,
            Error::NoValidQuery => ExitCode::NoValidQuery,
            Error::Extractor(_) => ExitCode::ExtractorFailed,
            _ => ExitCode::InvalidInput,
        };
        Self::new(exit, e.to_string())
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
