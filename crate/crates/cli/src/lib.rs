//! Experiment driver behind the `some` binary.

use std::fmt;

pub mod config;
pub mod experiment;
pub mod report;

/// Exit status for a configuration error.
pub const EXIT_CONFIG: i32 = 1;
/// Exit status for a failure while running or writing results.
pub const EXIT_RUNTIME: i32 = 2;

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    Config(String),
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Runtime(_) => EXIT_RUNTIME,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Runtime(m) => write!(f, "error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}
