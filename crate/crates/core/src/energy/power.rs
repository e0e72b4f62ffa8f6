use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum SleepLevel {
    Active,
    Sm1,
    Sm2,
    Sm3,
    Sm4,
}

pub const SLEEP_LEVELS: [SleepLevel; 4] = [
    SleepLevel::Sm1,
    SleepLevel::Sm2,
    SleepLevel::Sm3,
    SleepLevel::Sm4,
];

impl SleepLevel {
    /// Depth index: 0 for active, 1..=4 for SM1..SM4.
    pub fn depth(&self) -> u8 {
        *self as u8
    }

    fn sleep_index(&self) -> Option<usize> {
        match self {
            SleepLevel::Active => None,
            other => Some(other.depth() as usize - 1),
        }
    }

    fn deeper(&self) -> Option<SleepLevel> {
        match self {
            SleepLevel::Active => Some(SleepLevel::Sm1),
            SleepLevel::Sm1 => Some(SleepLevel::Sm2),
            SleepLevel::Sm2 => Some(SleepLevel::Sm3),
            SleepLevel::Sm3 => Some(SleepLevel::Sm4),
            SleepLevel::Sm4 => None,
        }
    }
}

impl fmt::Display for SleepLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SleepLevel::Active => "active",
            SleepLevel::Sm1 => "SM1",
            SleepLevel::Sm2 => "SM2",
            SleepLevel::Sm3 => "SM3",
            SleepLevel::Sm4 => "SM4",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SleepState {
    pub level: SleepLevel,
    /// Seconds without load.
    pub idle_since: f64,
    /// Remaining wake-up time; positive only while leaving a sleep level.
    pub wake_remaining_s: f64,
}

impl Default for SleepState {
    fn default() -> Self {
        Self::active()
    }
}

impl SleepState {
    pub const fn active() -> Self {
        Self {
            level: SleepLevel::Active,
            idle_since: 0.0,
            wake_remaining_s: 0.0,
        }
    }

    pub fn is_waking(&self) -> bool {
        self.level != SleepLevel::Active && self.wake_remaining_s > 0.0
    }

    /// Only an active station may grant resource blocks.
    pub fn can_grant(&self) -> bool {
        self.level == SleepLevel::Active
    }
}

/// Per-sector consumption parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PowerModel {
    pub p_overhead_w: f64,
    pub p_idle_active_w: f64,
    pub delta_load_w_per_rb: f64,
    /// SM1..SM4 draw as fractions of `p_idle_active_w`.
    pub sleep_fraction: [f64; 4],
    /// Idle time after which SM1..SM4 are entered.
    pub descend_after_s: [f64; 4],
    pub wake_latency_s: [f64; 4],
}

impl Default for PowerModel {
    fn default() -> Self {
        Self::small_cell()
    }
}

impl PowerModel {
    pub fn small_cell() -> Self {
        Self {
            p_overhead_w: 20.0,
            p_idle_active_w: 56.0,
            delta_load_w_per_rb: 0.5,
            sleep_fraction: [0.50, 0.30, 0.15, 0.05],
            descend_after_s: [1.0, 60.0, 300.0, 900.0],
            wake_latency_s: [0.0, 0.0, 1.0, 1.0],
        }
    }

    /// One MBS sector.
    pub fn macro_sector() -> Self {
        Self {
            p_overhead_w: 260.0,
            p_idle_active_w: 430.0,
            delta_load_w_per_rb: 2.0,
            ..Self::small_cell()
        }
    }

    pub fn validate(&self, key: &str) -> Result<()> {
        let err = |field: &str, why: &str| Err(Error::config(format!("{key}.{field}"), why));
        if !(self.p_overhead_w >= 0.0) {
            return err("p_overhead_w", "must be non-negative (W)");
        }
        if !(self.p_idle_active_w > 0.0) {
            return err("p_idle_active_w", "must be positive (W)");
        }
        if !(self.delta_load_w_per_rb > 0.0) {
            return err("delta_load_w_per_rb", "must be positive (W per RB)");
        }
        let f = &self.sleep_fraction;
        if !(f[0] < 1.0 && f[3] > 0.0 && f.windows(2).all(|w| w[0] > w[1])) {
            return err(
                "sleep_fraction",
                "must be strictly decreasing fractions within (0, 1)",
            );
        }
        let d = &self.descend_after_s;
        if !(d[0] > 0.0 && d.windows(2).all(|w| w[0] < w[1])) {
            return err("descend_after_s", "must be positive and strictly increasing (s)");
        }
        let w = &self.wake_latency_s;
        if !(w[0] >= 0.0 && w.windows(2).all(|p| p[0] <= p[1])) {
            return err("wake_latency_s", "must be non-negative and non-decreasing (s)");
        }
        Ok(())
    }
}

/// Draw of one sector in watts.
pub fn bs_power(occupied_rbs: u32, state: &SleepState, model: &PowerModel) -> Result<f64> {
    match state.level.sleep_index() {
        None => Ok(model.p_overhead_w
            + model.p_idle_active_w
            + model.delta_load_w_per_rb * f64::from(occupied_rbs)),
        Some(_) if occupied_rbs > 0 => Err(Error::LoadWhileAsleep {
            level: state.level.to_string(),
            rbs: occupied_rbs,
        }),
        // powering up draws the idle-active figure
        Some(_) if state.is_waking() => Ok(model.p_overhead_w + model.p_idle_active_w),
        Some(k) => Ok(model.p_overhead_w + model.sleep_fraction[k] * model.p_idle_active_w),
    }
}

/// Advances the sleep state machine by `dt_s`.
///
/// Load on a sleeping station starts a wake-up lasting the level's latency;
/// the station stays non-granting until it completes. Without load the idle
/// timer runs and the level deepens by at most one step per call.
pub fn sleep_transition(
    state: SleepState,
    has_load: bool,
    dt_s: f64,
    model: &PowerModel,
) -> SleepState {
    debug_assert!(dt_s > 0.0);
    if has_load {
        return match state.level.sleep_index() {
            None => SleepState::active(),
            Some(_) if state.is_waking() => {
                let remaining = state.wake_remaining_s - dt_s;
                if remaining <= 0.0 {
                    SleepState::active()
                } else {
                    SleepState {
                        wake_remaining_s: remaining,
                        ..state
                    }
                }
            }
            Some(k) => {
                let latency = model.wake_latency_s[k];
                if latency <= 0.0 {
                    SleepState::active()
                } else {
                    SleepState {
                        wake_remaining_s: latency,
                        ..state
                    }
                }
            }
        };
    }
    let idle = state.idle_since + dt_s;
    let level = match state.level.deeper() {
        Some(next) => {
            let threshold = model.descend_after_s[next.depth() as usize - 1];
            if idle >= threshold {
                next
            } else {
                state.level
            }
        }
        None => state.level,
    };
    SleepState {
        level,
        idle_since: idle,
        wake_remaining_s: 0.0,
    }
}
