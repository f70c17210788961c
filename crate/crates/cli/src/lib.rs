//! Experiment harness library: configuration, datasets, checkpoints, and
//! the train/eval/bounds entry points used by the `msnn` binary and tests.

pub mod checkpoint;
pub mod config;
pub mod data;
pub mod exec;
pub mod run;

use std::fmt;

/// Errors mapped to process exit codes: config problems exit 2, data
/// problems exit 3.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Data(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Data(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "config error: {msg}"),
            CliError::Data(msg) => write!(f, "data error: {msg}"),
        }
    }
}

impl std::error::Error for CliError {}
