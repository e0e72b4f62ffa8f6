use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Weibull};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const SECONDS_PER_DAY: f64 = 86_400.0;

/// PV and wind generation attached to one SCBS.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ResFarm {
    pub pv_rated_w: f64,
    /// Full-power-equivalent generation hours per day.
    pub pv_daily_hours: f64,
    pub pv_window_start_h: f64,
    pub pv_window_end_h: f64,
    pub wt_rated_w: f64,
    pub wt_cut_in_mps: f64,
    pub wt_rated_speed_mps: f64,
    pub wt_cut_out_mps: f64,
}

impl Default for ResFarm {
    fn default() -> Self {
        Self {
            pv_rated_w: 500.0,
            pv_daily_hours: 8.0,
            pv_window_start_h: 6.0,
            pv_window_end_h: 18.0,
            wt_rated_w: 300.0,
            wt_cut_in_mps: 3.0,
            wt_rated_speed_mps: 12.0,
            wt_cut_out_mps: 25.0,
        }
    }
}

impl ResFarm {
    pub fn validate(&self) -> Result<()> {
        if !(self.pv_rated_w >= 0.0) || !(self.wt_rated_w >= 0.0) {
            return Err(Error::config("res.pv_rated_w", "ratings must be non-negative (W)"));
        }
        let window_h = self.pv_window_end_h - self.pv_window_start_h;
        if !(self.pv_window_start_h >= 0.0 && self.pv_window_end_h <= 24.0 && window_h > 0.0) {
            return Err(Error::config(
                "res.pv_window_start_h",
                "generation window must lie within one day (hours)",
            ));
        }
        if !(self.pv_daily_hours >= 0.0 && self.pv_daily_hours <= window_h) {
            return Err(Error::config(
                "res.pv_daily_hours",
                "must be within [0, window length] (hours)",
            ));
        }
        if !(0.0 <= self.wt_cut_in_mps
            && self.wt_cut_in_mps < self.wt_rated_speed_mps
            && self.wt_rated_speed_mps <= self.wt_cut_out_mps)
        {
            return Err(Error::config(
                "res.wt_rated_speed_mps",
                "need 0 <= cut-in < rated <= cut-out (m/s)",
            ));
        }
        Ok(())
    }

    /// Peak PV output at solar noon.
    pub fn pv_peak_w(&self) -> f64 {
        let window_h = self.pv_window_end_h - self.pv_window_start_h;
        // a half-sine of peak P over W hours delivers 2PW/π
        self.pv_rated_w * self.pv_daily_hours * PI / (2.0 * window_h)
    }
}

/// Half-sine PV profile over the generation window; `time_of_day_s` in [0, 86400).
pub fn pv_power(time_of_day_s: f64, farm: &ResFarm) -> f64 {
    let start = farm.pv_window_start_h * 3600.0;
    let end = farm.pv_window_end_h * 3600.0;
    if time_of_day_s <= start || time_of_day_s >= end {
        return 0.0;
    }
    farm.pv_peak_w() * (PI * (time_of_day_s - start) / (end - start)).sin()
}

/// Piecewise wind-turbine power curve with a cubic ramp.
pub fn wt_power(wind_speed_mps: f64, farm: &ResFarm) -> f64 {
    let v = wind_speed_mps;
    if v < farm.wt_cut_in_mps || v > farm.wt_cut_out_mps {
        0.0
    } else if v >= farm.wt_rated_speed_mps {
        farm.wt_rated_w
    } else {
        let ci3 = farm.wt_cut_in_mps.powi(3);
        farm.wt_rated_w * (v.powi(3) - ci3) / (farm.wt_rated_speed_mps.powi(3) - ci3)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WindConfig {
    pub weibull_shape: f64,
    pub weibull_scale_mps: f64,
    pub change_interval_s: u64,
}

impl Default for WindConfig {
    fn default() -> Self {
        Self {
            weibull_shape: 2.0,
            weibull_scale_mps: 6.0,
            change_interval_s: 3600,
        }
    }
}

impl WindConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.weibull_shape > 0.0 && self.weibull_scale_mps > 0.0) {
            return Err(Error::config(
                "wind.weibull_shape",
                "Weibull shape and scale (m/s) must be positive",
            ));
        }
        if self.change_interval_s == 0 {
            return Err(Error::config("wind.change_interval_s", "must be positive (s)"));
        }
        Ok(())
    }
}

/// Site-wide piecewise-constant wind speed, one draw per interval.
#[derive(Debug, Clone)]
pub struct WindProfile {
    interval_s: u64,
    speeds_mps: Vec<f64>,
}

impl WindProfile {
    pub fn new(cfg: &WindConfig, seed: u64, duration_s: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(0x5749_4e44);
        let dist = Weibull::new(cfg.weibull_scale_mps, cfg.weibull_shape)
            .expect("validated Weibull parameters");
        let n = (duration_s / cfg.change_interval_s + 1) as usize;
        Self {
            interval_s: cfg.change_interval_s,
            speeds_mps: (0..n).map(|_| dist.sample(&mut rng)).collect(),
        }
    }

    pub fn speed_at(&self, t_s: u64) -> f64 {
        let k = ((t_s / self.interval_s) as usize).min(self.speeds_mps.len() - 1);
        self.speeds_mps[k]
    }
}
