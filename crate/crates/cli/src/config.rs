//! Scenario and simulation configuration: flat key=value files, layer
//! merging, and defaults.
//!
//! Precedence is flags > manifest > config file > defaults; each layer
//! is an [`Overrides`] and [`resolve`] takes the first bound value per
//! key, scanning strongest layer first.

use crate::error::CliError;
use aoi_core::{ChannelParams, Scenario, SimSettings};
use std::path::Path;

/// One layer of partially-bound configuration.
#[derive(Debug, Default, Clone, PartialEq)]
pub struct Overrides {
    pub sensors: Option<u32>,
    pub bits_per_sensor: Option<u32>,
    pub alpha: Option<u32>,
    pub rate: Option<f64>,
    /// Linear SNR; mutually exclusive with `snr_db` within one layer.
    pub snr: Option<f64>,
    pub snr_db: Option<f64>,
    pub slot_duration: Option<f64>,
    pub frames: Option<u64>,
    pub warmup: Option<u64>,
    pub replications: Option<u32>,
    pub seed: Option<u64>,
}

pub const KNOWN_KEYS: [&str; 11] = [
    "sensors",
    "bits_per_sensor",
    "alpha",
    "rate",
    "snr",
    "snr_db",
    "slot_duration",
    "frames",
    "warmup",
    "replications",
    "seed",
];

fn parse_value<T: std::str::FromStr>(key: &str, raw: &str) -> Result<T, CliError> {
    raw.parse().map_err(|_| {
        CliError::Validation(format!(
            "invalid {key}: cannot parse '{raw}' as {}",
            std::any::type_name::<T>()
        ))
    })
}

/// Parse a flat `key = value` file: one pair per line, `#` comments,
/// blank lines ignored. Unknown keys are errors, not warnings.
pub fn parse_config_file(path: &Path) -> Result<Overrides, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        CliError::Runtime(format!("reading config {}: {e}", path.display()))
    })?;
    let mut out = Overrides::default();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(CliError::Validation(format!(
                "{}:{}: expected 'key = value', got '{line}'",
                path.display(),
                lineno + 1
            )));
        };
        let (key, value) = (key.trim(), value.trim());
        match key {
            "sensors" => out.sensors = Some(parse_value(key, value)?),
            "bits_per_sensor" => out.bits_per_sensor = Some(parse_value(key, value)?),
            "alpha" => out.alpha = Some(parse_value(key, value)?),
            "rate" => out.rate = Some(parse_value(key, value)?),
            "snr" => out.snr = Some(parse_value(key, value)?),
            "snr_db" => out.snr_db = Some(parse_value(key, value)?),
            "slot_duration" => out.slot_duration = Some(parse_value(key, value)?),
            "frames" => out.frames = Some(parse_value(key, value)?),
            "warmup" => out.warmup = Some(parse_value(key, value)?),
            "replications" => out.replications = Some(parse_value(key, value)?),
            "seed" => out.seed = Some(parse_value(key, value)?),
            other => {
                return Err(CliError::Validation(format!(
                    "unknown config key '{other}' (known keys: {})",
                    KNOWN_KEYS.join(", ")
                )))
            }
        }
    }
    if out.snr.is_some() && out.snr_db.is_some() {
        return Err(CliError::Validation(format!(
            "{}: sets both snr and snr_db; use one",
            path.display()
        )));
    }
    Ok(out)
}

/// Fully resolved run inputs plus the plain values needed to write a
/// manifest.
#[derive(Debug, Clone, PartialEq)]
pub struct Resolved {
    pub scenario: Scenario,
    pub sim: SimSettings,
    /// Whether any layer bound `bits_per_sensor` explicitly (presets
    /// that vary it only step in when it was left at the default).
    pub bits_per_sensor_explicit: bool,
}

/// Merge layers (strongest first) and build the validated scenario and
/// simulation settings. `forced_error_rate` rides along from the
/// command line into the settings unchanged.
pub fn resolve(layers: &[&Overrides], forced_error_rate: Option<f64>) -> Result<Resolved, CliError> {
    let pick_u32 = |f: fn(&Overrides) -> Option<u32>| layers.iter().find_map(|l| f(l));
    let pick_u64 = |f: fn(&Overrides) -> Option<u64>| layers.iter().find_map(|l| f(l));
    let pick_f64 = |f: fn(&Overrides) -> Option<f64>| layers.iter().find_map(|l| f(l));

    let sensors = pick_u32(|l| l.sensors).unwrap_or(4);
    let bits_per_sensor = pick_u32(|l| l.bits_per_sensor);
    let alpha = pick_u32(|l| l.alpha).unwrap_or(0);
    let rate = pick_f64(|l| l.rate).unwrap_or(0.8);
    // The strongest layer that binds either SNR form wins outright, so
    // a --snr flag beats a config file's snr_db.
    let snr_linear = layers
        .iter()
        .find_map(|l| l.snr.or_else(|| l.snr_db.map(|db| 10f64.powf(db / 10.0))))
        .unwrap_or(3.0);
    let slot_duration = pick_f64(|l| l.slot_duration).unwrap_or(1.0);
    let frames = pick_u64(|l| l.frames).unwrap_or(100_000);
    // Short explicit runs should not be swallowed whole by the default
    // thousand-frame warm-up.
    let warmup = pick_u64(|l| l.warmup).unwrap_or_else(|| 1_000.min(frames / 10));
    let replications = pick_u32(|l| l.replications).unwrap_or(20);
    let seed = pick_u64(|l| l.seed).unwrap_or(1);

    let channel = ChannelParams::with_slot_duration(snr_linear, slot_duration)?;
    let scenario = Scenario::new(sensors, bits_per_sensor.unwrap_or(120), alpha, rate, channel)?;
    let sim = SimSettings {
        frames,
        warmup_frames: warmup,
        replications,
        seed,
        forced_error_rate,
    };
    Ok(Resolved {
        scenario,
        sim,
        bits_per_sensor_explicit: bits_per_sensor.is_some(),
    })
}
