//! Run manifests: a JSON record of every input that shaped a run, so
//! the run can be replayed bit for bit later.
//!
//! The `timestamp` and `tool_version` fields are provenance only;
//! replay ignores them. Everything else either rebuilds the scenario
//! (`scenario`), the Monte Carlo settings (`sim`), or the
//! subcommand-specific shape (`sweep`, `optimize`, `compare`,
//! `simulate`, `analyze`).

use crate::config::Overrides;
use crate::error::CliError;
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub sensors: u32,
    pub bits_per_sensor: u32,
    pub alpha: u32,
    pub rate: f64,
    pub snr: f64,
    pub slot_duration: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimSpec {
    pub frames: u64,
    pub warmup: u64,
    pub replications: u32,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub forced_error_rate: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepSection {
    pub variable: String,
    pub grid: Vec<f64>,
    pub scheme: String,
    pub with_simulation: bool,
    /// Per-sensor payload sizes the sweep is repeated over. Single
    /// entry for ordinary sweeps; the rate preset widens this to two
    /// payload sizes when the payload was left at its default.
    pub bits_per_sensor_blocks: Vec<u32>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimulateSection {
    pub scheme: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OptimizeSection {
    pub scheme: String,
    pub m_from: u32,
    pub m_to: u32,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub forced_error_rate: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CompareSection {
    pub alpha_from: u32,
    pub alpha_to: u32,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub forced_error_rate: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AnalyzeSection {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub forced_error_rate: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub tool_version: String,
    /// RFC 3339 creation time; not part of the replay identity.
    pub timestamp: String,
    pub scenario: ScenarioSpec,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub sim: Option<SimSpec>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub analyze: Option<AnalyzeSection>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub simulate: Option<SimulateSection>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub sweep: Option<SweepSection>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub optimize: Option<OptimizeSection>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub compare: Option<CompareSection>,
}

impl RunManifest {
    pub fn new(command: &str, scenario: ScenarioSpec) -> Self {
        RunManifest {
            command: command.to_string(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: chrono::Utc::now().to_rfc3339(),
            scenario,
            sim: None,
            analyze: None,
            simulate: None,
            sweep: None,
            optimize: None,
            compare: None,
        }
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::Runtime(format!("reading manifest {}: {e}", path.display()))
        })?;
        serde_json::from_str(&text).map_err(|e| {
            CliError::Validation(format!("manifest {}: {e}", path.display()))
        })
    }

    pub fn save(&self, path: &Path) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(self).map_err(|e| {
            CliError::Runtime(format!("serializing manifest: {e}"))
        })?;
        text.push('\n');
        std::fs::write(path, text).map_err(|e| {
            CliError::Runtime(format!("writing manifest {}: {e}", path.display()))
        })
    }

    /// Reject replays against the wrong subcommand up front.
    pub fn expect_command(&self, command: &str) -> Result<(), CliError> {
        if self.command != command {
            return Err(CliError::Validation(format!(
                "manifest records a '{}' run; replay it with that subcommand, not '{command}'",
                self.command
            )));
        }
        Ok(())
    }

    /// Scenario plus simulation settings as one override layer, slotted
    /// between command-line flags and any config file.
    pub fn as_overrides(&self) -> Overrides {
        Overrides {
            sensors: Some(self.scenario.sensors),
            bits_per_sensor: Some(self.scenario.bits_per_sensor),
            alpha: Some(self.scenario.alpha),
            rate: Some(self.scenario.rate),
            snr: Some(self.scenario.snr),
            snr_db: None,
            slot_duration: Some(self.scenario.slot_duration),
            frames: self.sim.as_ref().map(|s| s.frames),
            warmup: self.sim.as_ref().map(|s| s.warmup),
            replications: self.sim.as_ref().map(|s| s.replications),
            seed: self.sim.as_ref().map(|s| s.seed),
        }
    }
}
