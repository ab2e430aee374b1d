use std::io;
use std::path::Path;

use speckle_core::frame::FrameError;
use speckle_core::hwsim::HwError;
use speckle_core::metrics::DimensionMismatch;
use speckle_core::noise::NoiseError;
use speckle_core::pipeline::PipelineError;
use thiserror::Error;

/// Exit statuses follow the BSD sysexits convention.
pub mod exit {
    pub const SPECKLE_FREE: u8 = 0;
    pub const SPECKLE_DETECTED: u8 = 1;
    pub const USAGE: u8 = 64;
    pub const DATA: u8 = 65;
    pub const NO_INPUT: u8 = 66;
    pub const INTERNAL: u8 = 70;
    pub const CANT_CREATE: u8 = 73;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Write(String),
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => exit::USAGE,
            CliError::Data(_) => exit::DATA,
            CliError::Input(_) => exit::NO_INPUT,
            CliError::Write(_) => exit::CANT_CREATE,
            CliError::Internal(_) => exit::INTERNAL,
        }
    }

    pub fn io(path: &Path, e: io::Error) -> Self {
        CliError::Input(format!("{}: {e}", path.display()))
    }

    pub fn write(path: &Path, e: impl std::fmt::Display) -> Self {
        CliError::Write(format!("cannot write {}: {e}", path.display()))
    }
}

impl From<FrameError> for CliError {
    fn from(e: FrameError) -> Self {
        match e {
            FrameError::MissingFile(_) | FrameError::IoFailure { .. } => {
                CliError::Input(e.to_string())
            }
            _ => CliError::Data(e.to_string()),
        }
    }
}

impl From<PipelineError> for CliError {
    fn from(e: PipelineError) -> Self {
        match e {
            PipelineError::InvalidConfig(_) => CliError::Usage(e.to_string()),
            _ => CliError::Data(e.to_string()),
        }
    }
}

impl From<HwError> for CliError {
    fn from(e: HwError) -> Self {
        match e {
            HwError::Trace(_) => CliError::Write(e.to_string()),
            _ => CliError::Data(e.to_string()),
        }
    }
}

impl From<DimensionMismatch> for CliError {
    fn from(e: DimensionMismatch) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<NoiseError> for CliError {
    fn from(e: NoiseError) -> Self {
        CliError::Usage(e.to_string())
    }
}
