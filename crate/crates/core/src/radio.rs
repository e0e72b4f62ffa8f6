//! Link budget, RMa path loss and NR peak-rate computation.
//!
//! All SNR figures used for association are evaluated over a single
//! resource block of noise bandwidth (see [`rb_snr_db`]); [`link_snr`]
//! exposes the general form for an arbitrary allocation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scenario::BaseStationConfig;

/// Speed of light in m/s.
const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Thermal noise density at 290 K in dBm/Hz.
const THERMAL_NOISE_DBM_HZ: f64 = -174.0;

/// Subcarriers per resource block.
const SUBCARRIERS_PER_RB: u32 = 12;

/// Largest 2D distance covered by the RMa LOS model.
pub const RMA_MAX_DISTANCE_M: f64 = 10_000.0;

/// Smallest 2D distance covered by the RMa LOS model.
pub const RMA_MIN_DISTANCE_M: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LinkBudgetParams {
    pub carrier_freq_ghz: f64,
    pub bandwidth_mhz: f64,
    pub subcarrier_khz: f64,
    pub slow_fading_margin_db: f64,
    pub body_loss_db: f64,
    pub foliage_loss_db: f64,
    pub bs_antenna_gain_db: f64,
    pub ue_antenna_gain_db: f64,
    /// Receiver noise figure. Closure-calibrated so that the default link
    /// budget reproduces the nominal MBS and SCBS coverage radii.
    pub noise_figure_db: f64,
    pub min_snr_db: f64,
    /// RMa average building height.
    pub avg_building_height_m: f64,
}

impl Default for LinkBudgetParams {
    fn default() -> Self {
        Self {
            carrier_freq_ghz: 3.41,
            bandwidth_mhz: 40.0,
            subcarrier_khz: 30.0,
            slow_fading_margin_db: 6.0,
            body_loss_db: 3.0,
            foliage_loss_db: 11.0,
            bs_antenna_gain_db: 17.5,
            ue_antenna_gain_db: 0.0,
            noise_figure_db: 50.6,
            min_snr_db: -2.0,
            avg_building_height_m: 5.0,
        }
    }
}

impl LinkBudgetParams {
    /// Bandwidth of one resource block in Hz.
    pub fn rb_bandwidth_hz(&self) -> f64 {
        f64::from(SUBCARRIERS_PER_RB) * self.subcarrier_khz * 1e3
    }

    /// Sum of the fixed margins and losses applied to every link.
    pub fn fixed_losses_db(&self) -> f64 {
        self.slow_fading_margin_db + self.body_loss_db + self.foliage_loss_db
    }
}

/// Parameters of the NR approximate peak data-rate expression.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RateModelParams {
    pub n_layers: u32,
    /// Bits per modulation symbol (Qm).
    pub modulation_order: u32,
    pub scaling_factor: f64,
    pub max_code_rate: f64,
    pub overhead: f64,
    pub numerology_mu: u32,
    /// Share of OFDM symbols per slot carrying downlink data.
    pub dl_symbol_fraction: f64,
}

impl Default for RateModelParams {
    fn default() -> Self {
        Self {
            n_layers: 1,
            modulation_order: 8,
            scaling_factor: 1.0,
            max_code_rate: 948.0 / 1024.0,
            overhead: 0.14,
            numerology_mu: 1,
            dl_symbol_fraction: 12.0 / 14.0,
        }
    }
}

/// RMa LOS breakpoint distance in meters.
pub fn breakpoint_distance(fc_ghz: f64, h_bs: f64, h_ue: f64) -> f64 {
    2.0 * std::f64::consts::PI * h_bs * h_ue * fc_ghz * 1e9 / SPEED_OF_LIGHT
}

/// First RMa LOS slope evaluated at a 3D distance.
pub fn rma_los_pl1(d3d: f64, fc_ghz: f64, building_height: f64) -> f64 {
    let h = building_height;
    20.0 * (40.0 * std::f64::consts::PI * d3d * fc_ghz / 3.0).log10()
        + (0.03 * h.powf(1.72)).min(10.0) * d3d.log10()
        - (0.044 * h.powf(1.72)).min(14.77)
        + 0.002 * h.log10() * d3d
}

/// TR 38.901 RMa LOS path loss in dB with the default 5 m building height.
pub fn path_loss_rma(d2d: f64, fc_ghz: f64, h_bs: f64, h_ue: f64) -> Result<f64> {
    path_loss_rma_with(d2d, fc_ghz, h_bs, h_ue, 5.0)
}

pub fn path_loss_rma_with(
    d2d: f64,
    fc_ghz: f64,
    h_bs: f64,
    h_ue: f64,
    building_height: f64,
) -> Result<f64> {
    if !(RMA_MIN_DISTANCE_M..=RMA_MAX_DISTANCE_M).contains(&d2d) {
        return Err(Error::OutOfDomain {
            what: "2D distance",
            value: d2d,
            expected: "10 m to 10 km",
        });
    }
    if !(0.5..=30.0).contains(&fc_ghz) {
        return Err(Error::OutOfDomain {
            what: "carrier frequency",
            value: fc_ghz,
            expected: "0.5 to 30 GHz",
        });
    }
    Ok(rma_los_unchecked(d2d, fc_ghz, h_bs, h_ue, building_height))
}

fn rma_los_unchecked(d2d: f64, fc_ghz: f64, h_bs: f64, h_ue: f64, building_height: f64) -> f64 {
    let dh = h_bs - h_ue;
    let d3d = |d: f64| (d * d + dh * dh).sqrt();
    let d_bp = breakpoint_distance(fc_ghz, h_bs, h_ue);
    if d2d <= d_bp {
        rma_los_pl1(d3d(d2d), fc_ghz, building_height)
    } else {
        let d3_bp = d3d(d_bp);
        rma_los_pl1(d3_bp, fc_ghz, building_height) + 40.0 * (d3d(d2d) / d3_bp).log10()
    }
}

/// Thermal noise power in dBm over `bandwidth_hz`.
pub fn noise_power_dbm(bandwidth_hz: f64, noise_figure_db: f64) -> f64 {
    THERMAL_NOISE_DBM_HZ + 10.0 * bandwidth_hz.log10() + noise_figure_db
}

/// SNR of a link whose noise bandwidth spans `n_rbs` resource blocks.
pub fn link_snr(tx_power_dbm: f64, params: &LinkBudgetParams, pl_db: f64, n_rbs: u32) -> f64 {
    debug_assert!(n_rbs >= 1);
    let bandwidth = f64::from(n_rbs) * params.rb_bandwidth_hz();
    tx_power_dbm + params.bs_antenna_gain_db + params.ue_antenna_gain_db
        - pl_db
        - params.fixed_losses_db()
        - noise_power_dbm(bandwidth, params.noise_figure_db)
}

/// Single-RB SNR between `bs` and a UE at 2D distance `d2d`.
///
/// Distances below the model's 10 m floor are evaluated at 10 m. Returns
/// `-inf` beyond the model's range.
pub fn rb_snr_db(bs: &BaseStationConfig, params: &LinkBudgetParams, d2d: f64, h_ue: f64) -> f64 {
    if d2d > RMA_MAX_DISTANCE_M {
        return f64::NEG_INFINITY;
    }
    let d = d2d.max(RMA_MIN_DISTANCE_M);
    let pl = rma_los_unchecked(
        d,
        params.carrier_freq_ghz,
        bs.antenna_height_m,
        h_ue,
        params.avg_building_height_m,
    );
    link_snr(bs.tx_power_dbm, params, pl, 1)
}

/// Largest distance, at 1 m resolution, where the single-RB SNR still meets
/// `min_snr_db`. Zero when even the 10 m floor is infeasible.
pub fn coverage_radius(bs: &BaseStationConfig, params: &LinkBudgetParams, h_ue: f64) -> f64 {
    let feasible = |d: f64| rb_snr_db(bs, params, d, h_ue) >= params.min_snr_db;
    if !feasible(RMA_MIN_DISTANCE_M) {
        return 0.0;
    }
    if feasible(RMA_MAX_DISTANCE_M) {
        return RMA_MAX_DISTANCE_M;
    }
    let (mut lo, mut hi) = (RMA_MIN_DISTANCE_M, RMA_MAX_DISTANCE_M);
    while hi - lo > 1.0 {
        let mid = 0.5 * (lo + hi);
        if feasible(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo.floor()
}

/// Symbol duration Ts(μ) in seconds, averaged over a subframe.
pub fn symbol_duration_s(numerology_mu: u32) -> f64 {
    1e-3 / (14.0 * f64::from(1u32 << numerology_mu))
}

/// Approximate NR peak data rate in bit/s over `n_prb` resource blocks.
pub fn max_data_rate(n_prb: u32, p: &RateModelParams) -> f64 {
    f64::from(p.n_layers)
        * f64::from(p.modulation_order)
        * p.scaling_factor
        * p.max_code_rate
        * (f64::from(n_prb * SUBCARRIERS_PER_RB) / symbol_duration_s(p.numerology_mu))
        * (1.0 - p.overhead)
        * p.dl_symbol_fraction
}
