//! Random-waypoint user movement inside the deployment disc.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scenario::{uniform_in_disc, Point};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MobilityConfig {
    pub reposition_interval_s: f64,
    /// Relative jitter on each epoch length.
    pub interval_jitter: f64,
    pub speed_min_mps: f64,
    pub speed_max_mps: f64,
    pub rng_seed: u64,
}

impl Default for MobilityConfig {
    fn default() -> Self {
        Self {
            reposition_interval_s: 500.0,
            interval_jitter: 0.1,
            speed_min_mps: 0.5,
            speed_max_mps: 1.5,
            rng_seed: 1,
        }
    }
}

impl MobilityConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.reposition_interval_s > 0.0) {
            return Err(Error::config(
                "mobility.reposition_interval_s",
                "must be positive (s)",
            ));
        }
        if !(0.0..1.0).contains(&self.interval_jitter) {
            return Err(Error::config("mobility.interval_jitter", "must be in [0, 1)"));
        }
        if !(0.0 <= self.speed_min_mps && self.speed_min_mps <= self.speed_max_mps) {
            return Err(Error::config(
                "mobility.speed_min_mps",
                "need 0 <= speed_min_mps <= speed_max_mps (m/s)",
            ));
        }
        Ok(())
    }

    pub fn is_static(&self) -> bool {
        self.speed_max_mps == 0.0
    }
}

/// Movement of one user. The generator is seeded from the mobility seed and
/// the user id alone, so trajectories do not depend on other users.
#[derive(Debug, Clone)]
pub struct Trajectory {
    rng: ChaCha8Rng,
    center: Point,
    radius: f64,
    interval_s: f64,
    jitter: f64,
    speed_range: (f64, f64),
    position: Point,
    waypoint: Point,
    speed: f64,
    elapsed_s: f64,
    next_epoch_s: f64,
}

impl Trajectory {
    pub fn new(cfg: &MobilityConfig, user_id: usize, start: Point, center: Point, radius: f64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
        rng.set_stream(user_id as u64 + 1);
        let mut t = Self {
            rng,
            center,
            radius,
            interval_s: cfg.reposition_interval_s,
            jitter: cfg.interval_jitter,
            speed_range: (cfg.speed_min_mps, cfg.speed_max_mps),
            position: start,
            waypoint: start,
            speed: 0.0,
            elapsed_s: 0.0,
            next_epoch_s: 0.0,
        };
        t.new_epoch();
        t
    }

    fn new_epoch(&mut self) {
        self.waypoint = uniform_in_disc(&mut self.rng, self.center, self.radius);
        let (lo, hi) = self.speed_range;
        self.speed = if hi > lo {
            self.rng.random_range(lo..hi)
        } else {
            lo
        };
        let j = if self.jitter > 0.0 {
            self.rng.random_range(-self.jitter..self.jitter)
        } else {
            0.0
        };
        self.next_epoch_s = self.elapsed_s + self.interval_s * (1.0 + j);
    }

    pub fn position(&self) -> Point {
        self.position
    }

    pub fn waypoint(&self) -> Point {
        self.waypoint
    }

    /// Advances by `dt_s` and returns the new position.
    pub fn step(&mut self, dt_s: f64) -> Point {
        let mut remaining = dt_s;
        while remaining > 0.0 {
            let until_epoch = self.next_epoch_s - self.elapsed_s;
            let span = remaining.min(until_epoch);
            self.glide(span);
            self.elapsed_s += span;
            remaining -= span;
            if self.elapsed_s >= self.next_epoch_s {
                self.new_epoch();
            }
        }
        self.position
    }

    fn glide(&mut self, span_s: f64) {
        let dist = self.position.distance(&self.waypoint);
        let travel = self.speed * span_s;
        if travel >= dist {
            self.position = self.waypoint;
        } else if dist > 0.0 {
            let f = travel / dist;
            self.position = Point::new(
                self.position.x + f * (self.waypoint.x - self.position.x),
                self.position.y + f * (self.waypoint.y - self.position.y),
            );
        }
    }
}

/// Position of a user `t_s` seconds into its trajectory.
pub fn step_mobility(
    cfg: &MobilityConfig,
    user_id: usize,
    start: Point,
    center: Point,
    radius: f64,
    t_s: u64,
) -> Point {
    let mut tr = Trajectory::new(cfg, user_id, start, center, radius);
    for _ in 0..t_s {
        tr.step(1.0);
    }
    tr.position()
}
