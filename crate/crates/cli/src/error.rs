use std::fmt;
use std::path::Path;

/// A failure sorted by who has to fix it.
#[derive(Debug)]
pub enum CliError {
    /// Bad arguments or missing input files.
    User(String),
    /// Inputs that cannot be parsed, cleaned or solved.
    Data(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::User(_) => 1,
            CliError::Data(_) => 2,
        }
    }

    pub fn missing_file(what: &str, path: &Path) -> Self {
        CliError::User(format!("{what} file not found: {}", path.display()))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::User(m) | CliError::Data(m) => f.write_str(m),
        }
    }
}

impl std::error::Error for CliError {}

impl From<glass_core::Error> for CliError {
    fn from(e: glass_core::Error) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<glass_rollcall::Error> for CliError {
    fn from(e: glass_rollcall::Error) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Data(format!("I/O error: {e}"))
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Data(format!("CSV error: {e}"))
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Data(format!("JSON error: {e}"))
    }
}

pub type CliResult<T> = Result<T, CliError>;
