//! Versioned JSON envelope shared by every report the laboratory writes.

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

pub const REPORT_SCHEMA: &str = "pompeiu-lab/1";

/// `results` holds the command-specific payload. Nothing time-dependent is
/// recorded, so equal inputs give byte-identical files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report<T> {
    pub schema: String,
    pub version: String,
    pub command: String,
    pub seed: u64,
    pub inputs: serde_json::Value,
    pub results: T,
}

impl<T: Serialize> Report<T> {
    pub fn new(command: &str, seed: u64, inputs: serde_json::Value, results: T) -> Self {
        Self {
            schema: REPORT_SCHEMA.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            seed,
            inputs,
            results,
        }
    }

    /// Pretty JSON with a trailing newline.
    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self).map_err(|e| LabError::Internal(e.to_string()))?;
        s.push('\n');
        Ok(s)
    }
}
