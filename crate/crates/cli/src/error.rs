use std::fmt;

use fibsite_core::Error as CoreError;

/// Where in the input a problem was found.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Location {
    pub file: String,
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.file, self.line, self.column)
    }
}

/// Every failure the tool can report. Each class has its own exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("usage: {0}")]
    Usage(String),
    #[error("{at}: syntax error at `{token}`: {message}")]
    Syntax { at: Location, token: String, message: String },
    #[error("{at}: unresolved name `{token}`: {message}")]
    Unresolved { at: Location, token: String, message: String },
    #[error("{}validation failed: {message}", at.as_ref().map(|a| format!("{a}: ")).unwrap_or_default())]
    Validation { at: Option<Location>, message: String },
    #[error("refused: {0}")]
    Refused(String),
    #[error("cap exceeded: {0}")]
    CapExceeded(String),
}

pub mod exit {
    pub const OK: i32 = 0;
    pub const IO: i32 = 1;
    pub const PARSE: i32 = 2;
    pub const VALIDATION: i32 = 3;
    pub const REFUSED: i32 = 4;
    pub const CAP: i32 = 5;
    pub const UNRESOLVED: i32 = 6;
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } | CliError::Usage(_) => exit::IO,
            CliError::Syntax { .. } => exit::PARSE,
            CliError::Unresolved { .. } => exit::UNRESOLVED,
            CliError::Validation { .. } => exit::VALIDATION,
            CliError::Refused(_) => exit::REFUSED,
            CliError::CapExceeded(_) => exit::CAP,
        }
    }

    pub fn validation(message: impl Into<String>) -> Self {
        CliError::Validation { at: None, message: message.into() }
    }

    pub(crate) fn located(self, at: &Location) -> Self {
        match self {
            CliError::Validation { at: None, message } => CliError::Validation { at: Some(at.clone()), message },
            other => other,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::Input(m) | CoreError::Validation(m) => CliError::validation(m),
            CoreError::Refused(m) => CliError::Refused(m),
            CoreError::CapExceeded(m) => CliError::CapExceeded(m),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
