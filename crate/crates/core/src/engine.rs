//! One-second tick loop binding mobility, radio, assignment and energy.
//!
//! Each tick runs, in this order:
//!
//! 1. users move and the signal map is refreshed;
//! 2. handovers are detected and re-run through the active algorithm (by
//!    ascending user id), unserved users retry access, and the optional
//!    periodic re-association fires;
//! 3. generation and consumption are evaluated and batteries stepped;
//! 4. low-battery events evict the affected small cells' users;
//! 5. recovery events re-enable small cells;
//! 6. sleep states advance;
//! 7. the tick is logged.
//!
//! A station asleep when load arrives starts waking in step 3 of the same
//! tick and grants nothing until the wake-up completes. Users waiting for it
//! count as served with zero rate.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::assignment::{
    assign, assign_unserved, detect_handover, handle_bs_recovery, handle_bs_shutdown,
    AssignmentDecision, Algorithm, CellCapacity, CellLoadView, Outcome, Serving, SignalMap,
};
use crate::config::SimConfig;
use crate::energy::{
    battery_step, bs_power, pv_power, sleep_transition, wt_power, Battery, EnergyEvent,
    PowerModel, SleepLevel, SleepState, ThresholdMonitor, WindProfile, SECONDS_PER_DAY,
};
use crate::error::{Error, Result};
use crate::metrics::{self, Histogram, Distribution};
use crate::mobility::Trajectory;
use crate::radio::{coverage_radius, max_data_rate};
use crate::scenario::{
    build_layout_with, deploy_users, BaseStationConfig, NetworkLayout, Point, StationKind,
    UserEquipment, MBS_ID,
};

/// Layout, population and derived radii for one configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedScenario {
    pub layout: NetworkLayout,
    pub users: Vec<UserEquipment>,
    /// Indexed by station id.
    pub coverage_radius_m: Vec<f64>,
    /// Radius of the disc users are deployed in and move within.
    pub area_radius_m: f64,
}

impl ResolvedScenario {
    pub fn resolve(cfg: &SimConfig) -> Result<Self> {
        cfg.validate()?;
        let h_ue = cfg.scenario.ue_antenna_height_m;
        let mut mbs = BaseStationConfig::mbs(cfg.scenario.mbs_position());
        cfg.mbs.apply(&mut mbs);
        let mbs_radius = coverage_radius(&mbs, &cfg.link, h_ue);
        if mbs_radius <= 0.0 {
            return Err(Error::Layout(
                "the MBS covers no area under the configured link budget".into(),
            ));
        }
        let layout = build_layout_with(&cfg.scenario, &cfg.mbs, &cfg.scbs, mbs_radius)?;
        let coverage_radius_m = layout
            .stations
            .iter()
            .map(|s| coverage_radius(s, &cfg.link, h_ue))
            .collect();
        let area_radius_m = cfg.scenario.area_radius_m.unwrap_or(mbs_radius);
        let users = deploy_users(&cfg.scenario, area_radius_m);
        Ok(Self {
            layout,
            users,
            coverage_radius_m,
            area_radius_m,
        })
    }

    pub fn mbs_radius_m(&self) -> f64 {
        self.coverage_radius_m[MBS_ID]
    }

    /// Smallest small-cell radius (all small cells share parameters).
    pub fn scbs_radius_m(&self) -> Option<f64> {
        self.coverage_radius_m.get(1).copied()
    }
}

/// One simulation request.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationRun {
    pub config: SimConfig,
    pub algorithm: Algorithm,
}

impl SimulationRun {
    pub fn new(config: SimConfig, algorithm: Algorithm) -> Self {
        Self { config, algorithm }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.config = self.config.with_seed(seed);
        self
    }

    pub fn with_duration(mut self, duration_s: u64) -> Self {
        self.config.engine.duration_s = duration_s;
        self
    }

    pub fn seed(&self) -> u64 {
        self.config.scenario.rng_seed
    }

    pub fn n_ticks(&self) -> u64 {
        self.config.engine.duration_s / self.config.engine.tick_s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    Initial,
    Handover,
    Retry,
    Reassociation,
    /// A user displaced by a reallocation.
    Move,
    BatteryLow,
    BatteryRecovered,
    Shutdown,
    Recovery,
}

impl EventKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            EventKind::Initial => "initial",
            EventKind::Handover => "handover",
            EventKind::Retry => "retry",
            EventKind::Reassociation => "reassociation",
            EventKind::Move => "move",
            EventKind::BatteryLow => "battery_low",
            EventKind::BatteryRecovered => "battery_recovered",
            EventKind::Shutdown => "shutdown",
            EventKind::Recovery => "recovery",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventRecord {
    pub t_s: u64,
    pub kind: EventKind,
    pub user_id: Option<usize>,
    pub outcome: Option<Outcome>,
    pub bs_id: Option<usize>,
    /// MBS sector; 0 for single-sector small cells.
    pub sector: Option<usize>,
    pub rbs: u32,
    pub n_moves: usize,
}

impl EventRecord {
    fn station(t_s: u64, kind: EventKind, bs_id: usize) -> Self {
        Self {
            t_s,
            kind,
            user_id: None,
            outcome: None,
            bs_id: Some(bs_id),
            sector: None,
            rbs: 0,
            n_moves: 0,
        }
    }

    fn decision(t_s: u64, kind: EventKind, d: &AssignmentDecision) -> Self {
        let (bs_id, sector) = match d.outcome {
            Outcome::ServedByScbs(b) => (Some(b), Some(0)),
            Outcome::ServedByMbs(k) => (Some(MBS_ID), Some(k)),
            Outcome::Outage => (None, None),
        };
        Self {
            t_s,
            kind,
            user_id: Some(d.user_id),
            outcome: Some(d.outcome),
            bs_id,
            sector,
            rbs: d.rbs,
            n_moves: d.moves.len(),
        }
    }
}

/// Network-wide state of one tick. Power figures are means over the tick.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct TickRecord {
    pub t_s: u64,
    pub served: usize,
    pub outage: usize,
    /// Served users whose station is still waking up.
    pub waiting: usize,
    /// Granted RBs.
    pub mbs_rbs: u32,
    pub scbs_rbs: u32,
    pub rate_mbs_bps: f64,
    pub rate_scbs_bps: f64,
    pub draw_mbs_w: f64,
    pub draw_scbs_w: f64,
    pub gen_scbs_w: f64,
    pub charge_scbs_wh: f64,
    pub shortfall_scbs_w: f64,
    pub curtailed_scbs_w: f64,
    /// Grid-fed draw; only the MBS is grid-backed.
    pub ongrid_w: f64,
    pub handovers: u32,
    pub scbs_asleep: u32,
    pub scbs_depleted: u32,
}

/// Energy row of one station.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StationTick {
    pub t_s: u64,
    pub bs_id: usize,
    pub kind: StationKind,
    pub sleep_level: SleepLevel,
    pub gen_w: f64,
    pub draw_w: f64,
    /// Zero for stations without storage.
    pub charge_wh: f64,
    pub shortfall_w: f64,
    pub curtailed_w: f64,
}

/// Load row of one sector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SectorTick {
    pub t_s: u64,
    pub bs_id: usize,
    pub sector: usize,
    pub rbs_assigned: u32,
    pub rbs_granted: u32,
    pub n_users: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TickOutput {
    pub record: TickRecord,
    pub stations: Vec<StationTick>,
    pub sectors: Vec<SectorTick>,
    pub events: Vec<EventRecord>,
}

/// Receives every tick of a run, the t = 0 snapshot first.
pub trait RunObserver {
    fn on_tick(&mut self, out: &TickOutput, sim: &Simulation) -> Result<()>;
}

impl RunObserver for () {
    fn on_tick(&mut self, _: &TickOutput, _: &Simulation) -> Result<()> {
        Ok(())
    }
}

/// Network-wide records of a run.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct MetricsLog {
    pub tick_s: u64,
    pub n_users: usize,
    pub n_scbs: usize,
    /// State right after the initial assignment.
    pub snapshot: TickRecord,
    pub ticks: Vec<TickRecord>,
    pub events: Vec<EventRecord>,
}

impl MetricsLog {
    /// Rows metrics are computed over: the ticks, or the snapshot alone for
    /// a zero-duration run.
    pub fn rows(&self) -> &[TickRecord] {
        if self.ticks.is_empty() {
            std::slice::from_ref(&self.snapshot)
        } else {
            &self.ticks
        }
    }
}

struct EnergyEval {
    sleep: Vec<SleepState>,
    granting: Vec<bool>,
    stations: Vec<StationTick>,
    sectors: Vec<SectorTick>,
}

/// Complete mutable state of a run. Cloning it mid-run and stepping the
/// clone reproduces the original's tail exactly.
#[derive(Debug, Clone)]
pub struct Simulation {
    cfg: Arc<SimConfig>,
    scenario: Arc<ResolvedScenario>,
    wind: Arc<WindProfile>,
    algorithm: Algorithm,
    trajectories: Vec<Trajectory>,
    positions: Vec<Point>,
    cutoff_m: Vec<f64>,
    rate_bps: Vec<f64>,
    view: CellLoadView,
    batteries: Vec<Battery>,
    monitors: Vec<ThresholdMonitor>,
    sleep: Vec<SleepState>,
    t_s: u64,
}

impl Simulation {
    /// Builds the scenario, performs the initial assignment and returns the
    /// t = 0 snapshot.
    pub fn start(run: &SimulationRun) -> Result<(Self, TickOutput)> {
        let scenario = ResolvedScenario::resolve(&run.config)?;
        Self::start_with(run, Arc::new(scenario))
    }

    /// Like [`Simulation::start`] on an already resolved scenario.
    pub fn start_with(run: &SimulationRun, scenario: Arc<ResolvedScenario>) -> Result<(Self, TickOutput)> {
        let cfg = Arc::new(run.config.clone());
        cfg.validate()?;
        let layout = &scenario.layout;
        let n_scbs = layout.n_scbs();
        let h_ue = cfg.scenario.ue_antenna_height_m;
        let positions: Vec<Point> = scenario.users.iter().map(|u| u.position).collect();
        // one metre of slack over the 1 m radius resolution; the SNR floor
        // still decides feasibility
        let cutoff_m: Vec<f64> = scenario.coverage_radius_m.iter().map(|r| r + 1.0).collect();
        let signal = SignalMap::measure(layout, &positions, h_ue, &cfg.link, &cutoff_m);
        let demand: Vec<u32> = scenario
            .users
            .iter()
            .map(|u| u.traffic_class.demand_rbs())
            .collect();
        let rate_bps = demand.iter().map(|&d| max_data_rate(d, &cfg.rate)).collect();
        let mut view = CellLoadView::new(
            CellCapacity::from_layout(layout),
            demand,
            signal,
            cfg.link.min_snr_db,
        );
        view.realloc_depth = cfg.assignment.realloc_depth;
        let trajectories = if cfg.mobility.is_static() {
            Vec::new()
        } else {
            scenario
                .users
                .iter()
                .map(|u| {
                    Trajectory::new(
                        &cfg.mobility,
                        u.id,
                        u.position,
                        cfg.scenario.mbs_position(),
                        scenario.area_radius_m,
                    )
                })
                .collect()
        };
        let wind = Arc::new(WindProfile::new(
            &cfg.wind,
            cfg.scenario.rng_seed,
            cfg.engine.duration_s,
        ));
        let mut sim = Self {
            batteries: vec![cfg.battery.build(); n_scbs],
            monitors: vec![ThresholdMonitor::default(); n_scbs],
            sleep: vec![SleepState::active(); n_scbs + 1],
            algorithm: run.algorithm,
            trajectories,
            positions,
            cutoff_m,
            rate_bps,
            view,
            wind,
            scenario,
            cfg,
            t_s: 0,
        };

        let mut events = Vec::new();
        for b in 1..=n_scbs {
            let fraction = sim.batteries[b - 1].fraction();
            if sim.monitors[b - 1].update(fraction, &sim.cfg.policy) == Some(EnergyEvent::Below) {
                sim.view.set_battery_ok(b, false);
                events.push(EventRecord::station(0, EventKind::BatteryLow, b));
            }
        }
        let decisions = assign_unserved(&mut sim.view, sim.algorithm);
        push_decisions(&mut events, 0, EventKind::Initial, &decisions, |_| true);
        sim.check(0)?;

        let eval = sim.evaluate_energy(0)?;
        let mut stations = eval.stations;
        for s in &mut stations {
            // instantaneous snapshot: nothing stored or lost yet
            s.shortfall_w = 0.0;
            s.curtailed_w = 0.0;
        }
        let record = sim.record(0, &stations, &eval.granting, 0);
        Ok((
            sim,
            TickOutput {
                record,
                stations,
                sectors: eval.sectors,
                events,
            },
        ))
    }

    pub fn t_s(&self) -> u64 {
        self.t_s
    }

    pub fn algorithm(&self) -> Algorithm {
        self.algorithm
    }

    pub fn config(&self) -> &SimConfig {
        &self.cfg
    }

    pub fn scenario(&self) -> &ResolvedScenario {
        &self.scenario
    }

    pub fn view(&self) -> &CellLoadView {
        &self.view
    }

    pub fn positions(&self) -> &[Point] {
        &self.positions
    }

    /// Battery of small cell `bs_id` (1-based).
    pub fn battery(&self, bs_id: usize) -> &Battery {
        &self.batteries[bs_id - 1]
    }

    pub fn sleep_state(&self, bs_id: usize) -> SleepState {
        self.sleep[bs_id]
    }

    /// Advances one tick.
    pub fn step(&mut self) -> Result<TickOutput> {
        let dt = self.cfg.engine.tick_s;
        let t0 = self.t_s;
        let t1 = t0 + dt;
        let mut events = Vec::new();

        // 1. mobility
        if !self.trajectories.is_empty() {
            for (p, tr) in self.positions.iter_mut().zip(&mut self.trajectories) {
                *p = tr.step(dt as f64);
            }
            self.view.signal.update(
                &self.scenario.layout,
                &self.positions,
                self.cfg.scenario.ue_antenna_height_m,
                &self.cfg.link,
                &self.cutoff_m,
            );
        }

        // 2. handovers, retries, periodic re-association
        let hysteresis = self.cfg.assignment.handover_hysteresis_db;
        let mut handovers = 0u32;
        for u in 0..self.view.n_users() {
            if detect_handover(&self.view, u, self.algorithm, hysteresis).is_some() {
                self.view.detach(u);
                let d = assign(&mut self.view, u, self.algorithm);
                handovers += 1;
                push_decisions(&mut events, t1, EventKind::Handover, &[d], |_| true);
            }
        }
        if self.cfg.assignment.retry_outage {
            let decisions = assign_unserved(&mut self.view, self.algorithm);
            push_decisions(&mut events, t1, EventKind::Retry, &decisions, |d| {
                d.outcome != Outcome::Outage
            });
        }
        let period = self.cfg.assignment.periodic_reassoc_s;
        if period > 0 && t1.is_multiple_of(period) {
            for u in 0..self.view.n_users() {
                self.view.detach(u);
            }
            let decisions = assign_unserved(&mut self.view, self.algorithm);
            push_decisions(&mut events, t1, EventKind::Reassociation, &decisions, |_| true);
        }

        // 3. energy
        let eval = self.evaluate_energy(t0)?;
        self.sleep = eval.sleep;
        let mut stations = eval.stations;
        let n_scbs = self.view.n_scbs();
        for b in 1..=n_scbs {
            let row = &mut stations[b];
            let step = battery_step(self.batteries[b - 1], row.gen_w, row.draw_w, dt as f64);
            self.batteries[b - 1] = step.battery;
            row.charge_wh = step.battery.charge_wh;
            row.shortfall_w = step.shortfall_wh * 3600.0 / dt as f64;
            row.curtailed_w = step.curtailed_wh * 3600.0 / dt as f64;
        }
        let record_granting = eval.granting;
        let sectors = eval.sectors;

        // 4-5. threshold events, low-battery first
        let mut below = Vec::new();
        let mut recovered = Vec::new();
        for b in 1..=n_scbs {
            let fraction = self.batteries[b - 1].fraction();
            match self.monitors[b - 1].update(fraction, &self.cfg.policy) {
                Some(EnergyEvent::Below) => below.push(b),
                Some(EnergyEvent::Recovered) => recovered.push(b),
                None => {}
            }
        }
        for b in below {
            events.push(EventRecord::station(t1, EventKind::BatteryLow, b));
            let decisions = handle_bs_shutdown(&mut self.view, b, self.algorithm);
            push_decisions(&mut events, t1, EventKind::Shutdown, &decisions, |_| true);
        }
        for b in recovered {
            events.push(EventRecord::station(t1, EventKind::BatteryRecovered, b));
            let decisions = handle_bs_recovery(&mut self.view, b, self.algorithm);
            push_decisions(&mut events, t1, EventKind::Recovery, &decisions, |_| true);
        }

        // 6. sleep
        for b in 1..=n_scbs {
            let has_load = self.view.scbs_used(b) > 0;
            self.sleep[b] = sleep_transition(self.sleep[b], has_load, dt as f64, &self.cfg.power_scbs);
        }

        // 7. log
        self.t_s = t1;
        self.check(t1)?;
        let record = self.record(t1, &stations, &record_granting, handovers);
        Ok(TickOutput {
            record,
            stations,
            sectors,
            events,
        })
    }

    fn check(&self, t_s: u64) -> Result<()> {
        self.view
            .check_invariants()
            .map_err(|detail| Error::Invariant { t_s, detail })
    }

    /// Generation and draw over the tick starting at `t0`. Stations asleep
    /// with load begin waking first.
    fn evaluate_energy(&self, t0: u64) -> Result<EnergyEval> {
        let cfg = &self.cfg;
        let n_scbs = self.view.n_scbs();
        let tod = (cfg.engine.start_time_of_day_s + t0 as f64) % SECONDS_PER_DAY;
        let gen_w = pv_power(tod, &cfg.res) + wt_power(self.wind.speed_at(t0), &cfg.res);
        let t_s = t0 + cfg.engine.tick_s;

        let mut sleep = self.sleep.clone();
        let mut granting = vec![true; n_scbs + 1];
        let mut stations = Vec::with_capacity(n_scbs + 1);
        let mut sectors = Vec::with_capacity(n_scbs + 3);

        let mut mbs_users = vec![0usize; self.view.n_mbs_sectors()];
        for u in self.view.users_on_mbs() {
            if let Some(Serving::Mbs { sector }) = self.view.serving(u) {
                mbs_users[sector] += 1;
            }
        }
        let mut mbs_draw = 0.0;
        for (k, &n_users) in mbs_users.iter().enumerate() {
            let rbs = self.view.mbs_used(k);
            mbs_draw += bs_power(rbs, &SleepState::active(), &cfg.power_mbs)?;
            sectors.push(SectorTick {
                t_s,
                bs_id: MBS_ID,
                sector: k,
                rbs_assigned: rbs,
                rbs_granted: rbs,
                n_users,
            });
        }
        stations.push(StationTick {
            t_s,
            bs_id: MBS_ID,
            kind: StationKind::Mbs,
            sleep_level: SleepLevel::Active,
            gen_w: 0.0,
            draw_w: mbs_draw,
            charge_wh: 0.0,
            shortfall_w: 0.0,
            curtailed_w: 0.0,
        });

        for b in 1..=n_scbs {
            let used = self.view.scbs_used(b);
            if used > 0 {
                sleep[b] = wake_on_load(sleep[b], &cfg.power_scbs);
            }
            let state = sleep[b];
            granting[b] = state.can_grant();
            let granted = if granting[b] { used } else { 0 };
            let draw_w = if self.view.battery_ok(b) {
                bs_power(granted, &state, &cfg.power_scbs)?
            } else {
                cfg.power_scbs.p_overhead_w
            };
            stations.push(StationTick {
                t_s,
                bs_id: b,
                kind: StationKind::Scbs,
                sleep_level: state.level,
                gen_w,
                draw_w,
                charge_wh: self.batteries[b - 1].charge_wh,
                shortfall_w: 0.0,
                curtailed_w: 0.0,
            });
            sectors.push(SectorTick {
                t_s,
                bs_id: b,
                sector: 0,
                rbs_assigned: used,
                rbs_granted: granted,
                n_users: self.view.users_on(b).count(),
            });
        }
        Ok(EnergyEval {
            sleep,
            granting,
            stations,
            sectors,
        })
    }

    fn record(&self, t_s: u64, stations: &[StationTick], granting: &[bool], handovers: u32) -> TickRecord {
        let mut r = TickRecord {
            t_s,
            handovers,
            ..TickRecord::default()
        };
        for u in 0..self.view.n_users() {
            match self.view.serving(u) {
                None => r.outage += 1,
                Some(Serving::Mbs { .. }) => {
                    r.served += 1;
                    r.mbs_rbs += self.view.demand(u);
                    r.rate_mbs_bps += self.rate_bps[u];
                }
                Some(Serving::Scbs { bs_id }) => {
                    r.served += 1;
                    if granting[bs_id] {
                        r.scbs_rbs += self.view.demand(u);
                        r.rate_scbs_bps += self.rate_bps[u];
                    } else {
                        r.waiting += 1;
                    }
                }
            }
        }
        for s in stations {
            match s.kind {
                StationKind::Mbs => {
                    r.draw_mbs_w += s.draw_w;
                    r.ongrid_w += s.draw_w;
                }
                StationKind::Scbs => {
                    r.draw_scbs_w += s.draw_w;
                    r.gen_scbs_w += s.gen_w;
                    r.charge_scbs_wh += s.charge_wh;
                    r.shortfall_scbs_w += s.shortfall_w;
                    r.curtailed_scbs_w += s.curtailed_w;
                    if s.sleep_level != SleepLevel::Active {
                        r.scbs_asleep += 1;
                    }
                    if !self.view.battery_ok(s.bs_id) {
                        r.scbs_depleted += 1;
                    }
                }
            }
        }
        r
    }
}

/// Starts a wake-up on a sleeping station that has been given load.
fn wake_on_load(state: SleepState, model: &PowerModel) -> SleepState {
    let depth = state.level.depth() as usize;
    if depth == 0 || state.is_waking() {
        return state;
    }
    let latency = model.wake_latency_s[depth - 1];
    if latency <= 0.0 {
        SleepState::active()
    } else {
        SleepState {
            wake_remaining_s: latency,
            ..state
        }
    }
}

fn push_decisions(
    events: &mut Vec<EventRecord>,
    t_s: u64,
    kind: EventKind,
    decisions: &[AssignmentDecision],
    keep: impl Fn(&AssignmentDecision) -> bool,
) {
    for d in decisions.iter().filter(|d| keep(d)) {
        for m in &d.moves {
            events.push(EventRecord {
                t_s,
                kind: EventKind::Move,
                user_id: Some(m.user_id),
                outcome: Some(Outcome::ServedByScbs(m.to_bs)),
                bs_id: Some(m.to_bs),
                sector: Some(0),
                rbs: 0,
                n_moves: 0,
            });
        }
        events.push(EventRecord::decision(t_s, kind, d));
    }
}

/// Runs to completion without observing intermediate ticks.
pub fn run(run: &SimulationRun) -> Result<MetricsLog> {
    run_with(run, &mut ())
}

pub fn run_with(run: &SimulationRun, observer: &mut dyn RunObserver) -> Result<MetricsLog> {
    let (mut sim, out) = Simulation::start(run)?;
    observer.on_tick(&out, &sim)?;
    let n_ticks = run.n_ticks();
    let mut log = MetricsLog {
        tick_s: run.config.engine.tick_s,
        n_users: sim.view.n_users(),
        n_scbs: sim.view.n_scbs(),
        snapshot: out.record,
        ticks: Vec::with_capacity(n_ticks as usize),
        events: out.events,
    };
    for _ in 0..n_ticks {
        let out = sim.step()?;
        observer.on_tick(&out, &sim)?;
        log.ticks.push(out.record);
        log.events.extend(out.events);
    }
    Ok(log)
}

/// Outcome of one static run of a batch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunStats {
    pub seed: u64,
    pub mbs_load_share: f64,
    pub outage_share: f64,
    pub served: usize,
    pub outage: usize,
    pub mbs_rbs: u32,
    pub scbs_rbs: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchSummary {
    pub algorithm: Algorithm,
    pub base_seed: u64,
    pub n_runs: u64,
    pub runs: Vec<RunStats>,
    pub mbs_load_share: Distribution,
    pub outage_share: Distribution,
}

impl BatchSummary {
    pub fn mbs_load_histogram(&self, bins: usize, lo: f64, hi: f64) -> Histogram {
        Histogram::build(self.runs.iter().map(|r| r.mbs_load_share), bins, lo, hi)
    }

    pub fn outage_histogram(&self, bins: usize, lo: f64, hi: f64) -> Histogram {
        Histogram::build(self.runs.iter().map(|r| r.outage_share), bins, lo, hi)
    }
}

/// `n_runs` independent placement-only runs with seeds
/// `base_seed..base_seed + n_runs`, evaluated in parallel.
pub fn run_batch(cfg: &SimConfig, n_runs: u64, base_seed: u64, algorithm: Algorithm) -> Result<BatchSummary> {
    if n_runs == 0 {
        return Err(Error::config("runs", "a batch needs at least one run"));
    }
    cfg.validate()?;
    let runs = (0..n_runs)
        .into_par_iter()
        .map(|k| static_run(cfg, base_seed + k, algorithm))
        .collect::<Result<Vec<_>>>()?;
    Ok(BatchSummary {
        algorithm,
        base_seed,
        n_runs,
        mbs_load_share: Distribution::of(runs.iter().map(|r| r.mbs_load_share)),
        outage_share: Distribution::of(runs.iter().map(|r| r.outage_share)),
        runs,
    })
}

/// Initial assignment only, for one seed.
pub fn static_run(cfg: &SimConfig, seed: u64, algorithm: Algorithm) -> Result<RunStats> {
    let run = SimulationRun::new(cfg.clone(), algorithm)
        .with_seed(seed)
        .with_duration(0);
    let (sim, out) = Simulation::start(&run)?;
    let r = out.record;
    let log = MetricsLog {
        tick_s: run.config.engine.tick_s,
        n_users: sim.view.n_users(),
        n_scbs: sim.view.n_scbs(),
        snapshot: r,
        ..MetricsLog::default()
    };
    Ok(RunStats {
        seed,
        mbs_load_share: metrics::mbs_load_share(&log),
        outage_share: metrics::outage_share(&log),
        served: r.served,
        outage: r.outage,
        mbs_rbs: r.mbs_rbs,
        scbs_rbs: r.scbs_rbs,
    })
}
