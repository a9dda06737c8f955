use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use thiserror::Error;
use wsntrack_core::error::{AnalyticsError, ConfigError, EnergyError, SimError, TopologyError};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read config file {}: {source}", path.display())]
    ConfigFile { path: PathBuf, source: io::Error },
    #[error("invalid config file {}: {source}", path.display())]
    ConfigSyntax {
        path: PathBuf,
        source: toml::de::Error,
    },
    #[error("invalid configuration: {0}")]
    Config(#[from] ConfigError),
    #[error("invalid energy parameters: {0}")]
    Energy(#[from] EnergyError),
    #[error("invalid model parameters: {0}")]
    Analytics(#[from] AnalyticsError),
    #[error("{0}")]
    Usage(String),
    #[error("topology: {0}")]
    Topology(#[from] TopologyError),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("manifest: {0}")]
    Json(#[from] serde_json::Error),
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::Config(e) => CliError::Config(e),
            SimError::Topology(e) => CliError::Topology(e),
            SimError::Energy(e) => CliError::Energy(e),
        }
    }
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    /// 2 for bad input, 3 for an unusable network, 4 for anything else.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::ConfigFile { .. }
            | CliError::ConfigSyntax { .. }
            | CliError::Config(_)
            | CliError::Energy(_)
            | CliError::Analytics(_)
            | CliError::Usage(_) => 2,
            CliError::Topology(_) => 3,
            CliError::Io { .. } | CliError::Csv(_) | CliError::Json(_) => 4,
        }
    }
}

impl From<&CliError> for ExitCode {
    fn from(e: &CliError) -> Self {
        ExitCode::from(e.exit_code())
    }
}
