//! Library side of the `melnikov` command: instance files, the five
//! subcommands and their text/JSON/CSV renderings.

pub mod commands;
pub mod render;
pub mod spec;

pub use commands::{
    cmd_normal_form, cmd_sample_curve, cmd_scan, cmd_verify, cmd_zeros, ScanParams, VerifyParams,
};
pub use spec::{InstanceSpec, SpecError};

use thiserror::Error;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Json,
    Csv,
}

/// How a command finished. Only `Mismatch` maps to a failing exit status.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Ok,
    IdenticallyZero,
    Mismatch,
}

impl Status {
    pub fn name(self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::IdenticallyZero => "identically zero",
            Status::Mismatch => "mismatch",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Output {
    /// The report in the requested format.
    pub body: String,
    /// One-line summary printed when the body goes to a file.
    pub summary: String,
    pub status: Status,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("internal failure: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Internal(_) => 3,
        }
    }
}

/// Exit status for a finished command.
pub fn exit_code(status: Status) -> i32 {
    match status {
        Status::Ok | Status::IdenticallyZero => 0,
        Status::Mismatch => 1,
    }
}
