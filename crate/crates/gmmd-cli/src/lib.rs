//! Experiment harness and I/O plumbing behind the `gmmd` command line tool:
//! CSV data loading, flat key-value experiment configs, seeded power/size
//! experiments over sample-size grids, and machine-readable result emission.

pub mod config;
pub mod harness;
pub mod io;

use gmmd_core::ErrorKind;

/// Harness-level error, split by the same input/numeric boundary the core
/// library uses so the process exit code (2 input, 3 numeric) is mechanical.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Numeric(String),
}

impl CliError {
    pub fn input(msg: impl Into<String>) -> Self {
        CliError::Input(msg.into())
    }

    pub fn numeric(msg: impl Into<String>) -> Self {
        CliError::Numeric(msg.into())
    }

    /// Process exit code: 2 for input errors, 3 for numeric ones.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }
}

impl From<gmmd_core::Error> for CliError {
    fn from(e: gmmd_core::Error) -> Self {
        match e.kind() {
            ErrorKind::Input => CliError::Input(e.to_string()),
            ErrorKind::Numeric => CliError::Numeric(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Input(e.to_string())
    }
}
