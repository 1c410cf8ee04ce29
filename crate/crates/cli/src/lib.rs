//! Library side of the `noma-region` command: configuration, region files
//! and the `region`, `verify` and `hull` commands.

pub mod commands;
pub mod config;
pub mod output;

use thiserror::Error;

/// Failures that end a command with exit status 2.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration: {0}")]
    Config(String),
    #[error("malformed region file: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Usage(String),
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        match e.into_kind() {
            csv::ErrorKind::Io(io) => CliError::Io(io),
            other => CliError::Parse(format!("{other:?}")),
        }
    }
}

/// How a command that ran to completion ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Ok,
    /// `verify` found a point outside the tolerance.
    Mismatch,
    /// The scheme supports no rate for UE 1; a degenerate region was written.
    SchemeInfeasible,
}

impl Outcome {
    pub fn code(self) -> u8 {
        match self {
            Outcome::Ok => 0,
            Outcome::Mismatch => 1,
            Outcome::SchemeInfeasible => 3,
        }
    }
}

/// Exit status for a usage, parse or I/O failure.
pub const EXIT_USAGE: u8 = 2;
