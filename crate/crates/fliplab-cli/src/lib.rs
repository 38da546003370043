//! Batch experiment driver for the FLIP dynamics laboratory: seeded
//! sweeps, rank-bound audits, critical-block enumeration, sparse-word
//! construction, slow-sequence hunts, and plot emission. Every artifact
//! embeds the manifest that reproduces it.

pub mod config;
pub mod driver;
pub mod manifest;
pub mod plot;
pub mod records;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad arguments, bad files, malformed inputs. Exit code 2.
    #[error("{0}")]
    Usage(String),
    /// A checked fact about the mathematics failed. Exit code 1.
    #[error("fact check failed: {0}")]
    FactCheck(String),
    /// A configured resource cap refused the request. Exit code 3.
    #[error("resource cap: {0}")]
    Resource(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::FactCheck(_) => 1,
            CliError::Usage(_) | CliError::Io(_) => 2,
            CliError::Resource(_) => 3,
        }
    }
}
