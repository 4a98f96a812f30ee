use std::fmt;

use crate::config::ConfigError;

/// Process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exit {
    Ok = 0,
    SelftestFailed = 1,
    Validation = 2,
    Numerical = 3,
    Violated = 4,
    HypothesisFailed = 5,
}

impl Exit {
    pub fn code(self) -> i32 {
        self as i32
    }
}

#[derive(Debug)]
pub struct CliError {
    pub exit: Exit,
    pub message: String,
}

impl CliError {
    pub fn new(exit: Exit, message: impl Into<String>) -> Self {
        Self { exit, message: message.into() }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<qbp_core::Error> for CliError {
    fn from(e: qbp_core::Error) -> Self {
        let exit = if e.is_numerical() { Exit::Numerical } else { Exit::Validation };
        Self::new(exit, e.to_string())
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        Self::new(Exit::Validation, format!("config: {e}"))
    }
}
