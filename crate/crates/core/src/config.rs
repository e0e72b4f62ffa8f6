//! Simulation configuration: TOML parsing, validation and run manifests.
//!
//! Unknown keys are rejected. Every key carries its unit in its name
//! (`_m`, `_s`, `_w`, `_wh`, `_db`, `_dbm`, `_ghz`, ...); dimensionless
//! fractions and counts carry none.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::assignment::Algorithm;
use crate::energy::{BatteryConfig, EnergyPolicy, PowerModel, ResFarm, WindConfig};
use crate::error::{Error, Result};
use crate::mobility::MobilityConfig;
use crate::radio::{LinkBudgetParams, RateModelParams};
use crate::scenario::{ScenarioConfig, StationParams};

pub const SCHEMA_VERSION: u32 = 1;
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AssignmentConfig {
    /// Reallocation moves tried before falling back to the MBS (0 or 1).
    pub realloc_depth: u32,
    pub handover_hysteresis_db: f64,
    /// Period of a global re-association; 0 disables it.
    pub periodic_reassoc_s: u64,
    /// Let unserved users retry access every tick.
    pub retry_outage: bool,
}

impl Default for AssignmentConfig {
    fn default() -> Self {
        Self {
            realloc_depth: 1,
            handover_hysteresis_db: 3.0,
            periodic_reassoc_s: 0,
            retry_outage: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EngineConfig {
    pub duration_s: u64,
    pub tick_s: u64,
    /// Wall-clock time of day at t = 0.
    pub start_time_of_day_s: f64,
}

impl Default for EngineConfig {
    fn default() -> Self {
        Self {
            duration_s: 72 * 3600,
            tick_s: 1,
            start_time_of_day_s: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    pub scenario: ScenarioConfig,
    pub mbs: StationParams,
    pub scbs: StationParams,
    pub link: LinkBudgetParams,
    pub rate: RateModelParams,
    /// Per MBS sector.
    pub power_mbs: PowerModel,
    pub power_scbs: PowerModel,
    pub battery: BatteryConfig,
    pub res: ResFarm,
    pub wind: WindConfig,
    pub policy: EnergyPolicy,
    pub mobility: MobilityConfig,
    pub assignment: AssignmentConfig,
    pub engine: EngineConfig,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            scenario: ScenarioConfig::default(),
            mbs: StationParams::mbs(),
            scbs: StationParams::scbs(),
            link: LinkBudgetParams::default(),
            rate: RateModelParams::default(),
            power_mbs: PowerModel::macro_sector(),
            power_scbs: PowerModel::small_cell(),
            battery: BatteryConfig::default(),
            res: ResFarm::default(),
            wind: WindConfig::default(),
            policy: EnergyPolicy::default(),
            mobility: MobilityConfig::default(),
            assignment: AssignmentConfig::default(),
            engine: EngineConfig::default(),
        }
    }
}

const DEFAULT_CONFIG_HEADER: &str = "\
# greenran configuration. Every key is optional; omitted keys take the
# values shown here. Unknown keys are rejected.
#
# Units are part of the key name: _m meters, _s seconds, _w watts,
# _wh watt-hours, _db decibels, _dbm dBm, _ghz/_mhz/_khz hertz multiples,
# _mps meters per second, _h hours. Keys without a suffix are counts or
# dimensionless fractions.
#
# scenario.area_radius_m (absent by default) sets the user deployment disc;
# without it users are spread over the computed MBS coverage disc.
# power_mbs applies to each MBS sector. sleep_fraction, descend_after_s and
# wake_latency_s list SM1..SM4.

";

impl SimConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: SimConfig = toml::from_str(text).map_err(|e| Error::ConfigParse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads and validates a configuration file.
    pub fn parse_config(path: &Path) -> Result<Self> {
        let text = read_text(path)?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("configuration serializes to TOML")
    }

    /// Default configuration as an annotated TOML document.
    pub fn default_config_text() -> String {
        format!("{DEFAULT_CONFIG_HEADER}{}", Self::default().to_toml_string())
    }

    /// Sets every random seed from one run seed.
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.scenario.rng_seed = seed;
        self.mobility.rng_seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.scenario.validate()?;
        self.mbs.validate("mbs")?;
        self.scbs.validate("scbs")?;
        if self.scbs.n_sectors != 1 {
            return Err(Error::config("scbs.n_sectors", "small cells are single-sector"));
        }
        validate_link(&self.link)?;
        validate_rate(&self.rate)?;
        self.power_mbs.validate("power_mbs")?;
        self.power_scbs.validate("power_scbs")?;
        self.battery.validate()?;
        self.res.validate()?;
        self.wind.validate()?;
        self.policy.validate()?;
        self.mobility.validate()?;
        if self.assignment.realloc_depth > 1 {
            return Err(Error::config(
                "assignment.realloc_depth",
                "supported depths are 0 and 1",
            ));
        }
        if !(self.assignment.handover_hysteresis_db >= 0.0) {
            return Err(Error::config(
                "assignment.handover_hysteresis_db",
                "must be non-negative (dB)",
            ));
        }
        if self.engine.tick_s == 0 {
            return Err(Error::config("engine.tick_s", "must be at least 1 s"));
        }
        if !self.engine.duration_s.is_multiple_of(self.engine.tick_s) {
            return Err(Error::config(
                "engine.duration_s",
                "must be a whole number of ticks (s)",
            ));
        }
        if !(0.0..86_400.0).contains(&self.engine.start_time_of_day_s) {
            return Err(Error::config(
                "engine.start_time_of_day_s",
                "must be within [0, 86400) s",
            ));
        }
        Ok(())
    }
}

fn validate_link(p: &LinkBudgetParams) -> Result<()> {
    if !(0.5..=30.0).contains(&p.carrier_freq_ghz) {
        return Err(Error::config(
            "link.carrier_freq_ghz",
            "RMa model covers 0.5 to 30 GHz",
        ));
    }
    if !(p.bandwidth_mhz > 0.0 && p.subcarrier_khz > 0.0) {
        return Err(Error::config(
            "link.bandwidth_mhz",
            "bandwidth (MHz) and subcarrier spacing (kHz) must be positive",
        ));
    }
    if !(p.avg_building_height_m > 0.0) {
        return Err(Error::config(
            "link.avg_building_height_m",
            "must be a positive height in meters",
        ));
    }
    Ok(())
}

fn validate_rate(p: &RateModelParams) -> Result<()> {
    if p.n_layers == 0 || p.modulation_order == 0 {
        return Err(Error::config(
            "rate.n_layers",
            "layers and modulation order must be at least 1",
        ));
    }
    if !(0.0..=1.0).contains(&p.scaling_factor) {
        return Err(Error::config("rate.scaling_factor", "must be in [0, 1]"));
    }
    if !(0.0..=1.0).contains(&p.max_code_rate) {
        return Err(Error::config("rate.max_code_rate", "must be in [0, 1]"));
    }
    if !(0.0..1.0).contains(&p.overhead) {
        return Err(Error::config("rate.overhead", "must be in [0, 1)"));
    }
    if !(0.0..=1.0).contains(&p.dl_symbol_fraction) {
        return Err(Error::config("rate.dl_symbol_fraction", "must be in [0, 1]"));
    }
    if p.numerology_mu > 6 {
        return Err(Error::config("rate.numerology_mu", "must be within 0..=6"));
    }
    Ok(())
}

/// Reads a configuration-like file; failures count as configuration errors.
pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::ConfigParse(format!("{}: {e}", path.display())))
}

/// Hex SHA-256 of configuration bytes.
pub fn digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// Everything needed to reproduce a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunManifest {
    pub schema_version: u32,
    pub tool_version: String,
    /// SHA-256 of the configuration file as read (of the empty string when
    /// running on defaults).
    pub config_digest: String,
    pub command: String,
    pub algorithm: Option<Algorithm>,
    pub seed: u64,
    pub duration_s: u64,
    pub runs: Option<u64>,
    pub resolved_config: SimConfig,
}

impl RunManifest {
    pub fn read(path: &Path) -> Result<Self> {
        let text = read_text(path)?;
        let m: RunManifest =
            serde_json::from_str(&text).map_err(|e| Error::ConfigParse(e.to_string()))?;
        m.resolved_config.validate()?;
        Ok(m)
    }
}
