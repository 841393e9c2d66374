//! Flat key-value scenario configuration (TOML syntax).
//!
//! Every physical quantity carries its unit in the key name. Angles are in
//! degrees here and converted to radians on the way in; noise power is in
//! dBm here and converted to watts on the way in.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::array::{ArrayGeometry, FrequencyAllocation, PolarPosition, Scenario};
use crate::error::Error as CoreError;

/// Default scenario: 32 antennas, 1024 subcarriers over 5 MHz at 3 GHz,
/// Bob at (30°, 650 m), Eve at (100°, 550 m).
pub const DEFAULT_CONFIG: &str = include_str!("../configs/default.toml");

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("config parse error: {0}")]
    Parse(String),
    #[error("config key `{key}`: {reason}")]
    Invalid { key: String, reason: String },
    #[error("cannot read config {path}: {reason}")]
    Read { path: String, reason: String },
}

fn invalid(key: &str, reason: impl ToString) -> ConfigError {
    ConfigError::Invalid {
        key: key.to_string(),
        reason: reason.to_string(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub n_antennas: usize,
    pub n_subcarriers: usize,
    pub carrier_hz: f64,
    pub bandwidth_hz: f64,
    /// Defaults to half a carrier wavelength.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub element_spacing_m: Option<f64>,
    pub beta: f64,
    pub sigma2_dbm: f64,
    pub theta_bob_deg: f64,
    pub r_bob_m: f64,
    pub theta_eve_deg: f64,
    pub r_eve_m: f64,
    #[serde(default = "one")]
    pub reference_range_m: f64,
    /// Fixed comma-separated subcarrier list; random draws when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub allocation: Option<String>,
}

fn one() -> f64 {
    1.0
}

/// Validated configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    /// File contents with every default filled in.
    pub resolved: ConfigFile,
    pub scenario: Scenario,
    pub beta: f64,
    pub noise_power_w: f64,
    pub fixed_allocation: Option<FrequencyAllocation>,
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

impl Config {
    pub fn builtin() -> Self {
        Self::from_toml_str(DEFAULT_CONFIG, &[]).expect("bundled default config is valid")
    }

    /// Parses `text` and applies `overrides` (`key`, `value`) on top, where
    /// `value` is a TOML literal or a bare string.
    pub fn from_toml_str(text: &str, overrides: &[(String, String)]) -> Result<Self, ConfigError> {
        let mut table: toml::Table = text.parse().map_err(|e: toml::de::Error| ConfigError::Parse(e.to_string()))?;
        for (key, raw) in overrides {
            let value = format!("v = {raw}")
                .parse::<toml::Table>()
                .ok()
                .and_then(|mut t| t.remove("v"))
                .unwrap_or_else(|| toml::Value::String(raw.clone()));
            table.insert(key.clone(), value);
        }
        let file: ConfigFile = table
            .try_into()
            .map_err(|e: toml::de::Error| ConfigError::Parse(e.to_string()))?;
        Self::validate(file)
    }

    fn validate(mut file: ConfigFile) -> Result<Self, ConfigError> {
        if !(file.beta > 0.0 && file.beta < 1.0) {
            return Err(invalid("beta", format!("beta out of (0,1): {}", file.beta)));
        }
        if !file.sigma2_dbm.is_finite() {
            return Err(invalid("sigma2_dbm", "must be finite"));
        }
        if file.n_subcarriers == 0 {
            return Err(invalid("n_subcarriers", "must be positive"));
        }
        let spacing = file
            .element_spacing_m
            .unwrap_or(crate::array::LIGHT_SPEED / file.carrier_hz / 2.0);
        file.element_spacing_m = Some(spacing);
        let geometry = ArrayGeometry::new(
            file.n_antennas,
            spacing,
            file.carrier_hz,
            file.bandwidth_hz / file.n_subcarriers as f64,
            file.n_subcarriers,
        )
        .map_err(core_key)?;
        let bob = PolarPosition::from_degrees(file.theta_bob_deg, file.r_bob_m)
            .map_err(|e| position_key(e, "theta_bob_deg", "r_bob_m"))?;
        let eve = PolarPosition::from_degrees(file.theta_eve_deg, file.r_eve_m)
            .map_err(|e| position_key(e, "theta_eve_deg", "r_eve_m"))?;
        let scenario = Scenario::new(geometry, bob, eve, file.reference_range_m).map_err(core_key)?;
        let fixed_allocation = file
            .allocation
            .as_deref()
            .map(|text| FrequencyAllocation::parse(text, &geometry))
            .transpose()
            .map_err(|e| invalid("allocation", e))?;
        Ok(Self {
            beta: file.beta,
            noise_power_w: dbm_to_watts(file.sigma2_dbm),
            resolved: file,
            scenario,
            fixed_allocation,
        })
    }

    pub fn load(path: &Path, overrides: &[(String, String)]) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Read {
            path: path.display().to_string(),
            reason: e.to_string(),
        })?;
        Self::from_toml_str(&text, overrides)
    }
}

/// Reads and validates a configuration file.
pub fn load_config(path: &Path) -> Result<Config, ConfigError> {
    Config::load(path, &[])
}

fn core_key(e: CoreError) -> ConfigError {
    match e {
        CoreError::InvalidParameter { key, reason } => {
            let key = match key {
                "subcarrier_spacing_hz" => "bandwidth_hz",
                "eve" => "theta_eve_deg",
                other => other,
            };
            invalid(key, reason)
        }
        other => invalid("scenario", other),
    }
}

fn position_key(e: CoreError, theta_key: &str, range_key: &str) -> ConfigError {
    match e {
        CoreError::InvalidParameter { key: "range", reason } => invalid(range_key, reason),
        CoreError::InvalidParameter { reason, .. } => invalid(theta_key, reason),
        other => invalid(theta_key, other),
    }
}
