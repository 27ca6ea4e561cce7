//! Command-line companion to `swankit-core`: JSON model configs in, CSV
//! tables and checked reports out.
//!
//! Everything user-facing lives behind three rules. Configs are single JSON
//! files with fixed field names. Tables are plain CSV with full-precision
//! floats, so reruns of the same config are byte-identical. And no report
//! prints a bare number: every checked quantity travels with the tolerance
//! it was held to.
//!
//! The binary dispatches to [`commands`] for the per-model subcommands and
//! to [`verify`] for the acceptance suite. Both layers are plain functions
//! over [`config::ModelConfig`] so integration tests can drive them without
//! spawning processes.

pub mod commands;
pub mod config;
pub mod parallel;
pub mod report;
pub mod verify;

use std::fmt;

/// Failures split by exit code. Anything wrong with the input (unreadable
/// file, malformed JSON, inconsistent fields, parameters outside the
/// supported region) is a configuration error and exits 1. A computation
/// that ran but landed above its tolerance is a check failure and exits 2.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Check(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 1,
            CliError::Check(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "{m}"),
            CliError::Check(m) => write!(f, "{m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<swankit_core::Error> for CliError {
    fn from(e: swankit_core::Error) -> Self {
        use swankit_core::Error;
        match e {
            // Runtime numerics going sour is a failed check, not bad input.
            Error::Domain { .. } | Error::Numerics(_) => CliError::Check(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
