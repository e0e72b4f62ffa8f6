use serde::{Deserialize, Serialize};

use super::Battery;
use crate::error::{Error, Result};

/// Battery thresholds gating small-cell association.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnergyPolicy {
    /// Low-water mark as a fraction of capacity.
    pub threshold_e: f64,
    /// Fraction the charge must regain before the station is usable again.
    pub recovery_threshold: f64,
}

impl Default for EnergyPolicy {
    fn default() -> Self {
        Self {
            threshold_e: 0.2,
            recovery_threshold: 0.35,
        }
    }
}

impl EnergyPolicy {
    pub fn validate(&self) -> Result<()> {
        if !(0.0 <= self.threshold_e
            && self.threshold_e < self.recovery_threshold
            && self.recovery_threshold <= 1.0)
        {
            return Err(Error::config(
                "policy.threshold_e",
                "need 0 <= threshold_e < recovery_threshold <= 1 (fractions of capacity)",
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EnergyStatus {
    AboveThreshold,
    BelowThreshold,
    Recovered,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EnergyEvent {
    Below,
    Recovered,
}

/// Edge-triggered hysteresis on battery state of charge.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ThresholdMonitor {
    below: bool,
}

impl ThresholdMonitor {
    pub fn is_below(&self) -> bool {
        self.below
    }

    /// Feeds the current charge fraction, returning an event on a crossing.
    pub fn update(&mut self, fraction: f64, policy: &EnergyPolicy) -> Option<EnergyEvent> {
        if self.below {
            if fraction >= policy.recovery_threshold {
                self.below = false;
                return Some(EnergyEvent::Recovered);
            }
        } else if fraction < policy.threshold_e {
            self.below = true;
            return Some(EnergyEvent::Below);
        }
        None
    }
}

pub fn energy_status(
    b: &Battery,
    policy: &EnergyPolicy,
    monitor: &mut ThresholdMonitor,
) -> EnergyStatus {
    match monitor.update(b.fraction(), policy) {
        Some(EnergyEvent::Recovered) => EnergyStatus::Recovered,
        _ if monitor.is_below() => EnergyStatus::BelowThreshold,
        _ => EnergyStatus::AboveThreshold,
    }
}
