//! Command-line surface: JSON configs in, CSV/JSON reports out.

pub mod commands;
pub mod config;
pub mod output;

use thiserror::Error;

/// Errors mapped to process exit codes: 2 config, 3 domain, 4 I/O,
/// 5 solver nonconvergence.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("nonconvergence: {0}")]
    Nonconvergence(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Domain(_) => 3,
            CliError::Io(_) => 4,
            CliError::Nonconvergence(_) => 5,
        }
    }
}

impl From<crate::plasticity::FlowError> for CliError {
    fn from(e: crate::plasticity::FlowError) -> Self {
        use crate::plasticity::FlowError;
        match &e {
            FlowError::Nonconvergence { .. } => CliError::Nonconvergence(e.to_string()),
            FlowError::StepFailed { source, .. } => match source.as_ref() {
                FlowError::Nonconvergence { .. } => CliError::Nonconvergence(e.to_string()),
                _ => CliError::Domain(e.to_string()),
            },
            _ => CliError::Domain(e.to_string()),
        }
    }
}

impl From<crate::energy::EnergyError> for CliError {
    fn from(e: crate::energy::EnergyError) -> Self {
        CliError::Domain(e.to_string())
    }
}

impl From<crate::ellipticity::EllipticityError> for CliError {
    fn from(e: crate::ellipticity::EllipticityError) -> Self {
        use crate::ellipticity::EllipticityError;
        match &e {
            EllipticityError::Domain(_) => CliError::Domain(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
