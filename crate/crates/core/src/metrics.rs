//! Reductions of a [`MetricsLog`] to load shares, outage and energy efficiency.
//!
//! Energy efficiency is expressed in Mb/J per second: the sum rate in Mb/s
//! divided by the energy consumed in the tick. Two averaging conventions are
//! provided: the mean of per-tick ratios (the default) and the ratio of
//! summed rate to summed energy.

use serde::{Deserialize, Serialize};

use crate::engine::{MetricsLog, TickRecord};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Group {
    Scbs,
    Mbs,
    Total,
}

impl Group {
    fn rate_mbps(&self, r: &TickRecord) -> f64 {
        let bps = match self {
            Group::Scbs => r.rate_scbs_bps,
            Group::Mbs => r.rate_mbs_bps,
            Group::Total => r.rate_scbs_bps + r.rate_mbs_bps,
        };
        bps / 1e6
    }

    fn draw_w(&self, r: &TickRecord) -> f64 {
        match self {
            Group::Scbs => r.draw_scbs_w,
            Group::Mbs => r.draw_mbs_w,
            Group::Total => r.draw_scbs_w + r.draw_mbs_w,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Efficiency {
    /// Mean over ticks of rate / energy.
    pub per_tick_mean: f64,
    /// Total data over total energy, per second.
    pub ratio_of_sums: f64,
    /// Ticks skipped because the group consumed nothing.
    pub excluded_ticks: u64,
}

/// Energy efficiency of one station group in Mb/J per second.
pub fn energy_efficiency(log: &MetricsLog, group: Group) -> Result<Efficiency> {
    let dt = log.tick_s.max(1) as f64;
    let mut sum_ratio = 0.0;
    let mut counted = 0u64;
    let mut excluded = 0u64;
    let mut rate_sum = 0.0;
    let mut energy_sum = 0.0;
    for r in log.rows() {
        let energy_j = group.draw_w(r) * dt;
        if energy_j > 0.0 {
            let rate = group.rate_mbps(r);
            sum_ratio += rate / energy_j;
            rate_sum += rate;
            energy_sum += energy_j;
            counted += 1;
        } else {
            excluded += 1;
        }
    }
    if counted == 0 {
        return Err(Error::Metric(format!(
            "{group:?} group consumed no energy in any of {excluded} ticks"
        )));
    }
    Ok(Efficiency {
        per_tick_mean: sum_ratio / counted as f64,
        ratio_of_sums: rate_sum / energy_sum,
        excluded_ticks: excluded,
    })
}

/// Fraction of served RB-ticks carried directly by MBS sectors; 0 when
/// nothing was served.
pub fn mbs_load_share(log: &MetricsLog) -> f64 {
    let (mbs, total) = rb_ticks(log);
    if total == 0 {
        0.0
    } else {
        mbs as f64 / total as f64
    }
}

pub fn scbs_load_share(log: &MetricsLog) -> f64 {
    let (mbs, total) = rb_ticks(log);
    if total == 0 {
        0.0
    } else {
        (total - mbs) as f64 / total as f64
    }
}

fn rb_ticks(log: &MetricsLog) -> (u64, u64) {
    log.rows().iter().fold((0, 0), |(m, t), r| {
        (
            m + u64::from(r.mbs_rbs),
            t + u64::from(r.mbs_rbs) + u64::from(r.scbs_rbs),
        )
    })
}

/// Mean over ticks of the unserved fraction of users.
pub fn outage_share(log: &MetricsLog) -> f64 {
    if log.n_users == 0 {
        return 0.0;
    }
    let rows = log.rows();
    let sum: f64 = rows
        .iter()
        .map(|r| r.outage as f64 / log.n_users as f64)
        .sum();
    sum / rows.len() as f64
}

/// Grid-fed energy per window in kWh.
pub fn on_grid_energy_series(log: &MetricsLog, window_s: u64) -> Result<Vec<f64>> {
    let dt = log.tick_s;
    let duration = log.ticks.len() as u64 * dt;
    if window_s == 0 || !window_s.is_multiple_of(dt) || !duration.is_multiple_of(window_s) {
        return Err(Error::Metric(format!(
            "window of {window_s} s does not partition a {duration} s run of {dt} s ticks"
        )));
    }
    let per_window = (window_s / dt) as usize;
    Ok(log
        .ticks
        .chunks(per_window)
        .map(|c| c.iter().map(|r| r.ongrid_w * dt as f64).sum::<f64>() / 3.6e6)
        .collect())
}

/// Total grid-fed energy in kWh.
pub fn on_grid_energy_kwh(log: &MetricsLog) -> f64 {
    log.ticks
        .iter()
        .map(|r| r.ongrid_w * log.tick_s as f64)
        .sum::<f64>()
        / 3.6e6
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyEfficiencyReport {
    /// Per-tick mean convention; `None` when the group never drew power.
    pub ee_scbs: Option<f64>,
    pub ee_mbs: Option<f64>,
    pub ee_total: Option<f64>,
    pub ee_scbs_ratio_of_sums: Option<f64>,
    pub ee_mbs_ratio_of_sums: Option<f64>,
    pub ee_total_ratio_of_sums: Option<f64>,
    pub excluded_ticks_scbs: u64,
    pub excluded_ticks_mbs: u64,
    pub excluded_ticks_total: u64,
    pub on_grid_kwh: f64,
    pub mbs_load_share: f64,
    pub outage_share: f64,
    pub warnings: Vec<String>,
}

impl EnergyEfficiencyReport {
    pub fn from_log(log: &MetricsLog) -> Self {
        let mut warnings = Vec::new();
        let mut eval = |g: Group| match energy_efficiency(log, g) {
            Ok(e) => (Some(e.per_tick_mean), Some(e.ratio_of_sums), e.excluded_ticks),
            Err(e) => {
                warnings.push(e.to_string());
                (None, None, log.rows().len() as u64)
            }
        };
        let scbs = eval(Group::Scbs);
        let mbs = eval(Group::Mbs);
        let total = eval(Group::Total);
        if rb_ticks(log).1 == 0 {
            warnings.push("no traffic served; MBS load share reported as 0".into());
        }
        Self {
            ee_scbs: scbs.0,
            ee_mbs: mbs.0,
            ee_total: total.0,
            ee_scbs_ratio_of_sums: scbs.1,
            ee_mbs_ratio_of_sums: mbs.1,
            ee_total_ratio_of_sums: total.1,
            excluded_ticks_scbs: scbs.2,
            excluded_ticks_mbs: mbs.2,
            excluded_ticks_total: total.2,
            on_grid_kwh: on_grid_energy_kwh(log),
            mbs_load_share: mbs_load_share(log),
            outage_share: outage_share(log),
            warnings,
        }
    }
}

/// Mean, spread and range of a sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Distribution {
    pub n: u64,
    pub mean: f64,
    /// Population standard deviation.
    pub std: f64,
    pub min: f64,
    pub max: f64,
}

impl Distribution {
    pub fn of(values: impl IntoIterator<Item = f64>) -> Self {
        let v: Vec<f64> = values.into_iter().collect();
        if v.is_empty() {
            return Self {
                n: 0,
                mean: 0.0,
                std: 0.0,
                min: 0.0,
                max: 0.0,
            };
        }
        let n = v.len() as f64;
        let mean = v.iter().sum::<f64>() / n;
        let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
        Self {
            n: v.len() as u64,
            mean,
            std: var.sqrt(),
            min: v.iter().copied().fold(f64::INFINITY, f64::min),
            max: v.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        }
    }
}

/// Equal-width bins over `[lo, hi]`; the last bin is closed, values outside
/// the range are clamped into the edge bins.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub lo: f64,
    pub hi: f64,
    pub counts: Vec<u64>,
}

impl Histogram {
    pub fn build(values: impl IntoIterator<Item = f64>, bins: usize, lo: f64, hi: f64) -> Self {
        let bins = bins.max(1);
        let width = (hi - lo) / bins as f64;
        let mut counts = vec![0u64; bins];
        for x in values {
            let k = if width > 0.0 {
                (((x - lo) / width).floor().max(0.0) as usize).min(bins - 1)
            } else {
                0
            };
            counts[k] += 1;
        }
        Self { lo, hi, counts }
    }

    pub fn edges(&self) -> Vec<f64> {
        let n = self.counts.len();
        let width = (self.hi - self.lo) / n as f64;
        (0..=n).map(|k| self.lo + width * k as f64).collect()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }
}
