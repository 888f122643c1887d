//! File formats, grid execution and command-line plumbing around
//! [`seedbuf_core`].

pub mod config;
pub mod edgelist;
pub mod grid;
pub mod tables;

use thiserror::Error;

/// Top-level failure, split by exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad arguments, unreadable or malformed inputs. Exit code 1.
    #[error("{0}")]
    Input(String),
    /// Failure while computing or writing results. Exit code 2.
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 1,
            CliError::Runtime(_) => 2,
        }
    }
}

impl From<config::ConfigError> for CliError {
    fn from(e: config::ConfigError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<edgelist::LoadError> for CliError {
    fn from(e: edgelist::LoadError) -> Self {
        CliError::Input(e.to_string())
    }
}
