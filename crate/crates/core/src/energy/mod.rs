//! Renewable supply, storage and base-station power draw.

mod battery;
mod policy;
mod power;
mod res;

pub use battery::{battery_step, Battery, BatteryConfig, BatteryStep};
pub use policy::{energy_status, EnergyEvent, EnergyPolicy, EnergyStatus, ThresholdMonitor};
pub use power::{bs_power, sleep_transition, PowerModel, SleepLevel, SleepState, SLEEP_LEVELS};
pub use res::{pv_power, wt_power, ResFarm, WindConfig, WindProfile, SECONDS_PER_DAY};
