//! Batch front-end for `fock-core`.
//!
//! Every command delegates to one library operation and writes a JSON summary
//! (`<command>.json`, embedding the effective config) plus CSV payloads into
//! the output directory.

pub mod config;
mod dispatch;
mod verify;

use std::fmt;

use fock_core::FockError;

pub use config::RunConfig;
pub use dispatch::{dispatch, Command, Report};

#[derive(Debug)]
pub enum CliError {
    /// Malformed config, flag or symbol.
    Parse(String),
    /// A library routine refused to certify its result.
    Numeric(FockError),
    /// `verify` found failing checks.
    VerifyFailed(usize),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Numeric(_) => 3,
            CliError::VerifyFailed(_) => 1,
            CliError::Io(_) => 4,
        }
    }
}

impl From<FockError> for CliError {
    fn from(e: FockError) -> Self {
        match e {
            FockError::Parse(_)
            | FockError::InvalidParams(_)
            | FockError::UnsupportedScheme(_)
            | FockError::LengthMismatch { .. } => CliError::Parse(e.to_string()),
            other => CliError::Numeric(other),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Parse(m) => write!(f, "parse error: {m}"),
            CliError::Numeric(e) => write!(f, "numeric policy violation: {e}"),
            CliError::VerifyFailed(k) => write!(f, "verify: {k} checks failed"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}
