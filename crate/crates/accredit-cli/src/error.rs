//! Error type carrying the process exit code contract:
//! 0 ok, 2 parse, 3 validation, 4 capacity.

use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitKind {
    Parse,
    Validation,
    Capacity,
}

impl ExitKind {
    pub fn code(self) -> u8 {
        match self {
            ExitKind::Parse => 2,
            ExitKind::Validation => 3,
            ExitKind::Capacity => 4,
        }
    }
}

#[derive(Debug)]
pub struct CliError {
    pub kind: ExitKind,
    pub message: String,
}

impl CliError {
    pub fn parse(message: impl Into<String>) -> Self {
        CliError {
            kind: ExitKind::Parse,
            message: message.into(),
        }
    }

    pub fn validation(message: impl Into<String>) -> Self {
        CliError {
            kind: ExitKind::Validation,
            message: message.into(),
        }
    }

    pub fn capacity(message: impl Into<String>) -> Self {
        CliError {
            kind: ExitKind::Capacity,
            message: message.into(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.message)
    }
}

impl std::error::Error for CliError {}
