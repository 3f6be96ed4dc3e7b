//! JSON config files and flag/file merging.
//!
//! A config file is one object: `command`, a `parameters` record, and the
//! optional `master_seed` / `output_path` / `format`. Command-line flags
//! override file values; unknown keys are rejected.

use serde::Deserialize;
use serde_json::Value;
use std::collections::BTreeMap;
use std::path::Path;

use crate::CliError;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub command: Option<String>,
    #[serde(default)]
    pub parameters: BTreeMap<String, Value>,
    pub master_seed: Option<u64>,
    pub output_path: Option<String>,
    pub format: Option<String>,
}

pub fn load(path: &Path) -> Result<FileConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("bad config {}: {e}", path.display())))
}

impl FileConfig {
    /// Reject parameter keys the selected command does not understand.
    pub fn check_keys(&self, allowed: &[&str]) -> Result<(), CliError> {
        for key in self.parameters.keys() {
            if !allowed.contains(&key.as_str()) {
                return Err(CliError::Usage(format!("unknown parameter key: {key}")));
            }
        }
        Ok(())
    }

    pub fn real(&self, key: &str) -> Result<Option<f64>, CliError> {
        match self.parameters.get(key) {
            None => Ok(None),
            Some(v) => v
                .as_f64()
                .map(Some)
                .ok_or_else(|| CliError::Usage(format!("parameter {key} must be a number, got {v}"))),
        }
    }

    pub fn integer(&self, key: &str) -> Result<Option<usize>, CliError> {
        match self.parameters.get(key) {
            None => Ok(None),
            Some(v) => v
                .as_u64()
                .map(|n| Some(n as usize))
                .ok_or_else(|| CliError::Usage(format!("parameter {key} must be a non-negative integer, got {v}"))),
        }
    }

    pub fn text(&self, key: &str) -> Result<Option<String>, CliError> {
        match self.parameters.get(key) {
            None => Ok(None),
            Some(v) => v
                .as_str()
                .map(|s| Some(s.to_string()))
                .ok_or_else(|| CliError::Usage(format!("parameter {key} must be a string, got {v}"))),
        }
    }
}

/// Flag value, else file value, else default.
pub fn resolve<T>(flag: Option<T>, file: Option<T>, default: T) -> T {
    flag.or(file).unwrap_or(default)
}

/// Flag value, else file value, else a usage error naming the parameter.
pub fn require<T>(flag: Option<T>, file: Option<T>, name: &str) -> Result<T, CliError> {
    flag.or(file).ok_or_else(|| CliError::Usage(format!("missing required parameter: {name}")))
}
