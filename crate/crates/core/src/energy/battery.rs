use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BatteryConfig {
    /// Nameplate capacity: 77 Ah at 12 V.
    pub capacity_wh: f64,
    pub max_charge_w: f64,
    pub max_discharge_w: f64,
    /// State of charge at t = 0 as a fraction of capacity.
    pub initial_fraction: f64,
}

impl Default for BatteryConfig {
    fn default() -> Self {
        Self {
            capacity_wh: 77.0 * 12.0,
            max_charge_w: 300.0,
            max_discharge_w: 924.0,
            initial_fraction: 1.0,
        }
    }
}

impl BatteryConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.capacity_wh > 0.0) {
            return Err(Error::config("battery.capacity_wh", "must be positive (Wh)"));
        }
        if !(self.max_charge_w >= 0.0) || !(self.max_discharge_w >= 0.0) {
            return Err(Error::config(
                "battery.max_charge_w",
                "charge and discharge limits must be non-negative (W)",
            ));
        }
        if !(0.0..=1.0).contains(&self.initial_fraction) {
            return Err(Error::config(
                "battery.initial_fraction",
                "must be a fraction in [0, 1]",
            ));
        }
        Ok(())
    }

    pub fn build(&self) -> Battery {
        Battery {
            capacity_wh: self.capacity_wh,
            charge_wh: self.capacity_wh * self.initial_fraction,
            max_charge_w: self.max_charge_w,
            max_discharge_w: self.max_discharge_w,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Battery {
    pub capacity_wh: f64,
    pub charge_wh: f64,
    pub max_charge_w: f64,
    pub max_discharge_w: f64,
}

impl Battery {
    pub fn fraction(&self) -> f64 {
        self.charge_wh / self.capacity_wh
    }
}

/// Outcome of one battery update. The energy identity
/// `(generation - draw) * dt / 3600 = Δcharge + curtailed - shortfall`
/// holds exactly up to rounding.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BatteryStep {
    pub battery: Battery,
    /// Surplus that could not be stored.
    pub curtailed_wh: f64,
    /// Demand that could not be met.
    pub shortfall_wh: f64,
}

pub fn battery_step(b: Battery, generation_w: f64, draw_w: f64, dt_s: f64) -> BatteryStep {
    debug_assert!(dt_s > 0.0);
    let hours = dt_s / 3600.0;
    let net_w = generation_w - draw_w;
    let mut next = b;
    let (curtailed_wh, shortfall_wh) = if net_w >= 0.0 {
        let rate_w = net_w.min(b.max_charge_w);
        let offered = rate_w * hours;
        let stored = offered.min(b.capacity_wh - b.charge_wh).max(0.0);
        next.charge_wh = (b.charge_wh + stored).min(b.capacity_wh);
        ((net_w - rate_w) * hours + (offered - stored), 0.0)
    } else {
        let need_w = -net_w;
        let rate_w = need_w.min(b.max_discharge_w);
        let wanted = rate_w * hours;
        let taken = wanted.min(b.charge_wh).max(0.0);
        next.charge_wh = (b.charge_wh - taken).max(0.0);
        (0.0, (need_w - rate_w) * hours + (wanted - taken))
    };
    BatteryStep {
        battery: next,
        curtailed_wh,
        shortfall_wh,
    }
}
