//! Library side of the roamsim CLI: scenario files, output writers, and the
//! subcommand implementations.

pub mod commands;
pub mod output;
pub mod scenario;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Scenario schema or validation problem; maps to exit code 2.
    #[error("{0}")]
    Schema(String),
    /// Filesystem trouble; maps to exit code 3.
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Schema(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}
