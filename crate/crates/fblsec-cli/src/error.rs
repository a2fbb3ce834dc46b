//! Process-level error taxonomy mapped to exit codes: validation errors exit
//! 2, numeric failures exit 3, verification failures exit 4.

use std::fmt;

use fblsec::{LeakageError, MultiOptError, SingleOptError, SpecFunError};

#[derive(Debug)]
pub enum CliError {
    Validation(String),
    Numeric(String),
    VerificationFailed { failed: usize, total: usize },
}

impl CliError {
    pub fn validation(field: &str, message: &str) -> Self {
        CliError::Validation(format!("invalid config field '{field}': {message}"))
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Numeric(_) => 3,
            CliError::VerificationFailed { .. } => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Validation(msg) => write!(f, "{msg}"),
            CliError::Numeric(msg) => write!(f, "numeric failure: {msg}"),
            CliError::VerificationFailed { failed, total } => {
                write!(f, "verification failed: {failed} of {total} checks")
            }
        }
    }
}

impl std::error::Error for CliError {}

impl From<crate::config::ConfigError> for CliError {
    fn from(e: crate::config::ConfigError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<LeakageError> for CliError {
    fn from(e: LeakageError) -> Self {
        CliError::Numeric(e.to_string())
    }
}

impl From<SingleOptError> for CliError {
    fn from(e: SingleOptError) -> Self {
        CliError::Numeric(e.to_string())
    }
}

impl From<MultiOptError> for CliError {
    fn from(e: MultiOptError) -> Self {
        CliError::Numeric(e.to_string())
    }
}

impl From<SpecFunError> for CliError {
    fn from(e: SpecFunError) -> Self {
        CliError::Numeric(e.to_string())
    }
}
