//! Command-line front end: scenario ingestion, orchestration and CSV output.
//!
//! The binary in `src/main.rs` only parses arguments, performs file I/O and
//! maps [`CliError`] to an exit code; everything else lives here so it can be
//! tested without spawning processes.

pub mod commands;
pub mod csv;
pub mod figures;
pub mod scenario;

use thiserror::Error;

use crate::error::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_NUMERIC: i32 = 2;
pub const EXIT_VALIDITY: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },

    #[error("scenario parse error: {0}")]
    Parse(String),

    #[error("invalid {field}: {message}")]
    Invalid { field: String, message: String },

    #[error("usage: {0}")]
    Usage(String),

    #[error(transparent)]
    Core(#[from] Error),
}

impl CliError {
    /// 0 success, 1 validation, 2 numeric failure, 3 threshold assumption violated.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } | CliError::Parse(_) | CliError::Invalid { .. } | CliError::Usage(_) => EXIT_VALIDATION,
            CliError::Core(e) => match e {
                Error::Domain(_) | Error::InvalidRequest(_) => EXIT_VALIDATION,
                Error::NonConvergence(_) | Error::FitQuality(_) | Error::DegenerateFixedPoint => EXIT_NUMERIC,
                Error::Validity(_) => EXIT_VALIDITY,
            },
        }
    }
}
