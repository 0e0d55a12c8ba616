//! Command-line front end for `photodetect-core`: config loading, the
//! subcommands and CSV/JSON output.

pub mod commands;
pub mod config;
pub mod output;

use std::path::PathBuf;

/// Everything that ends a run early, with the process exit code it maps to.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] config::ConfigError),
    #[error("cannot write {path}: {source}")]
    Output {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Model(#[from] photodetect_core::Error),
    #[error("validation failed: {0}")]
    Validation(String),
}

impl CliError {
    /// 1 for model and validation failures, 2 for usage, config and IO errors.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Model(_) | CliError::Validation(_) => 1,
            CliError::Config(_) | CliError::Output { .. } | CliError::Usage(_) => 2,
        }
    }
}
