//! Config file loading. The file is TOML with keys named after the
//! `SimConfig` fields; command-line flags are layered on top.

use std::fs;
use std::path::Path;

use wsntrack_core::config::validate_config;
use wsntrack_core::{RawSettings, SimConfig};

use crate::error::CliError;

pub fn read_settings(path: &Path) -> Result<RawSettings, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::ConfigFile {
        path: path.to_owned(),
        source,
    })?;
    parse_settings(&text).map_err(|source| CliError::ConfigSyntax {
        path: path.to_owned(),
        source,
    })
}

pub fn parse_settings(text: &str) -> Result<RawSettings, toml::de::Error> {
    toml::from_str(text)
}

/// File values (if any) overridden by flag values, then validated.
pub fn resolve(file: Option<&Path>, flags: &RawSettings) -> Result<SimConfig, CliError> {
    let base = match file {
        Some(path) => read_settings(path)?,
        None => RawSettings::default(),
    };
    Ok(validate_config(&base.merged_with(flags))?)
}
