//! Library side of the `fmc` command: configuration, the subcommands and
//! the acceptance checks.

pub mod acceptance;
pub mod commands;
pub mod config;
pub mod lamfile;

/// A failed command. Usage errors exit with 2, domain errors with 1.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Domain(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Domain(_) => 1,
        }
    }
}
