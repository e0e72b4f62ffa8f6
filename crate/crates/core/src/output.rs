//! CSV and JSON artifacts of simulation and batch runs.
//!
//! Times in the `t` columns are seconds since the start of the run; the
//! t = 0 row of each per-tick table is the snapshot after the initial
//! assignment. Numeric columns carry their unit as a name suffix except
//! counts. Floats are written in shortest round-trip form, so identical runs
//! give identical bytes.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::assignment::{Algorithm, Outcome};
use crate::config::{RunManifest, SCHEMA_VERSION, TOOL_VERSION};
use crate::engine::{
    run_with, BatchSummary, MetricsLog, ResolvedScenario, RunObserver, Simulation,
    SimulationRun, TickOutput, TickRecord,
};
use crate::error::Result;
use crate::metrics::{self, Distribution, EnergyEfficiencyReport, Histogram};

pub const ENERGY_HEADER: [&str; 8] = [
    "t", "bs_id", "sleep_level", "gen_w", "draw_w", "charge_wh", "shortfall_w", "curtailed_w",
];
pub const LOAD_HEADER: [&str; 6] = ["t", "bs_id", "sector", "rbs_assigned", "rbs_granted", "n_users"];
pub const NETWORK_HEADER: [&str; 18] = [
    "t",
    "served",
    "outage",
    "waiting",
    "mbs_rbs",
    "scbs_rbs",
    "rate_mbs_bps",
    "rate_scbs_bps",
    "draw_mbs_w",
    "draw_scbs_w",
    "gen_scbs_w",
    "charge_scbs_wh",
    "shortfall_scbs_w",
    "curtailed_scbs_w",
    "ongrid_w",
    "handovers",
    "scbs_asleep",
    "scbs_depleted",
];
pub const EVENTS_HEADER: [&str; 8] = [
    "t", "event_type", "user_id", "outcome", "bs_id", "sector", "rbs", "n_moves",
];
pub const ONGRID_HEADER: [&str; 3] = ["window_start_s", "window_end_s", "ongrid_kwh"];
pub const TRAJECTORY_HEADER: [&str; 4] = ["t", "user_id", "x", "y"];
pub const BATCH_HEADER: [&str; 8] = [
    "algorithm", "seed", "mbs_load_share", "outage_share", "served", "outage", "mbs_rbs", "scbs_rbs",
];
pub const HISTOGRAM_HEADER: [&str; 6] = ["algorithm", "metric", "bin", "bin_lo", "bin_hi", "count"];

/// JSON Schema of `summary.json`.
pub const SUMMARY_SCHEMA: &str = include_str!("../schemas/summary.schema.json");
/// JSON Schema of `batch_summary.json`.
pub const BATCH_SUMMARY_SCHEMA: &str = include_str!("../schemas/batch_summary.schema.json");

/// Window of the on-grid energy series.
pub const ONGRID_WINDOW_S: u64 = 3600;

type CsvOut = csv::Writer<BufWriter<File>>;

/// Files created in an output directory, removed again unless committed.
struct Staging {
    dir: PathBuf,
    created_dir: bool,
    files: Vec<PathBuf>,
    committed: bool,
}

impl Staging {
    fn new(dir: &Path) -> Result<Self> {
        let created_dir = !dir.exists();
        fs::create_dir_all(dir)?;
        Ok(Self {
            dir: dir.to_path_buf(),
            created_dir,
            files: Vec::new(),
            committed: false,
        })
    }

    fn path(&mut self, name: &str) -> PathBuf {
        let p = self.dir.join(name);
        self.files.push(p.clone());
        p
    }

    fn csv(&mut self, name: &str, header: &[&str]) -> Result<CsvOut> {
        let f = File::create(self.path(name))?;
        let mut w = csv::Writer::from_writer(BufWriter::with_capacity(1 << 16, f));
        w.write_record(header)?;
        Ok(w)
    }

    fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        fs::write(self.path(name), text)?;
        Ok(())
    }

    fn text(&mut self, name: &str, text: &str) -> Result<()> {
        fs::write(self.path(name), text)?;
        Ok(())
    }
}

impl Drop for Staging {
    fn drop(&mut self) {
        if self.committed {
            return;
        }
        for f in &self.files {
            let _ = fs::remove_file(f);
        }
        if self.created_dir {
            let _ = fs::remove_dir(&self.dir);
        }
    }
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn outcome_label(o: Option<Outcome>) -> &'static str {
    o.map(|o| o.label()).unwrap_or("")
}

/// Streams per-tick tables while a run executes.
struct TickSink {
    energy: CsvOut,
    load: CsvOut,
    network: CsvOut,
    events: CsvOut,
    trajectory: Option<CsvOut>,
}

impl TickSink {
    fn open(staging: &mut Staging, trajectory: bool) -> Result<Self> {
        Ok(Self {
            energy: staging.csv("energy.csv", &ENERGY_HEADER)?,
            load: staging.csv("load.csv", &LOAD_HEADER)?,
            network: staging.csv("network.csv", &NETWORK_HEADER)?,
            events: staging.csv("events.csv", &EVENTS_HEADER)?,
            trajectory: if trajectory {
                Some(staging.csv("trajectory.csv", &TRAJECTORY_HEADER)?)
            } else {
                None
            },
        })
    }

    fn finish(self) -> Result<()> {
        for mut w in [self.energy, self.load, self.network, self.events]
            .into_iter()
            .chain(self.trajectory)
        {
            w.flush()?;
        }
        Ok(())
    }
}

fn network_row(r: &TickRecord) -> [String; 18] {
    [
        r.t_s.to_string(),
        r.served.to_string(),
        r.outage.to_string(),
        r.waiting.to_string(),
        r.mbs_rbs.to_string(),
        r.scbs_rbs.to_string(),
        r.rate_mbs_bps.to_string(),
        r.rate_scbs_bps.to_string(),
        r.draw_mbs_w.to_string(),
        r.draw_scbs_w.to_string(),
        r.gen_scbs_w.to_string(),
        r.charge_scbs_wh.to_string(),
        r.shortfall_scbs_w.to_string(),
        r.curtailed_scbs_w.to_string(),
        r.ongrid_w.to_string(),
        r.handovers.to_string(),
        r.scbs_asleep.to_string(),
        r.scbs_depleted.to_string(),
    ]
}

impl RunObserver for TickSink {
    fn on_tick(&mut self, out: &TickOutput, sim: &Simulation) -> Result<()> {
        for s in &out.stations {
            self.energy.write_record([
                s.t_s.to_string(),
                s.bs_id.to_string(),
                s.sleep_level.to_string(),
                s.gen_w.to_string(),
                s.draw_w.to_string(),
                s.charge_wh.to_string(),
                s.shortfall_w.to_string(),
                s.curtailed_w.to_string(),
            ])?;
        }
        for s in &out.sectors {
            self.load.write_record([
                s.t_s.to_string(),
                s.bs_id.to_string(),
                s.sector.to_string(),
                s.rbs_assigned.to_string(),
                s.rbs_granted.to_string(),
                s.n_users.to_string(),
            ])?;
        }
        self.network.write_record(network_row(&out.record))?;
        for e in &out.events {
            self.events.write_record([
                e.t_s.to_string(),
                e.kind.as_str().to_string(),
                opt(e.user_id),
                outcome_label(e.outcome).to_string(),
                opt(e.bs_id),
                opt(e.sector),
                e.rbs.to_string(),
                e.n_moves.to_string(),
            ])?;
        }
        if let Some(w) = &mut self.trajectory {
            let t = out.record.t_s.to_string();
            for (u, p) in sim.positions().iter().enumerate() {
                w.write_record([t.clone(), u.to_string(), p.x.to_string(), p.y.to_string()])?;
            }
        }
        Ok(())
    }
}

/// Contents of `summary.json` for a single run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub schema_version: u32,
    pub tool_version: String,
    pub algorithm: Algorithm,
    pub seed: u64,
    pub duration_s: u64,
    pub tick_s: u64,
    pub n_users: usize,
    pub n_scbs: usize,
    pub mbs_radius_m: f64,
    pub scbs_radius_m: Option<f64>,
    pub area_radius_m: f64,
    #[serde(flatten)]
    pub report: EnergyEfficiencyReport,
    pub ongrid_window_s: Option<u64>,
    pub ongrid_series_kwh: Vec<f64>,
    pub final_served: usize,
    pub final_outage: usize,
    pub handovers: u64,
    pub event_counts: BTreeMap<String, u64>,
}

impl RunSummary {
    pub fn new(log: &MetricsLog, scenario: &ResolvedScenario, run: &SimulationRun) -> Result<Self> {
        let duration_s = run.config.engine.duration_s;
        let window = ongrid_window(duration_s);
        let series = match window {
            Some(w) => metrics::on_grid_energy_series(log, w)?,
            None => Vec::new(),
        };
        let mut event_counts = BTreeMap::new();
        for e in &log.events {
            *event_counts.entry(e.kind.as_str().to_string()).or_insert(0) += 1;
        }
        let last = log.ticks.last().unwrap_or(&log.snapshot);
        Ok(Self {
            schema_version: SCHEMA_VERSION,
            tool_version: TOOL_VERSION.to_string(),
            algorithm: run.algorithm,
            seed: run.seed(),
            duration_s,
            tick_s: log.tick_s,
            n_users: log.n_users,
            n_scbs: log.n_scbs,
            mbs_radius_m: scenario.mbs_radius_m(),
            scbs_radius_m: scenario.scbs_radius_m(),
            area_radius_m: scenario.area_radius_m,
            report: EnergyEfficiencyReport::from_log(log),
            ongrid_window_s: window,
            ongrid_series_kwh: series,
            final_served: last.served,
            final_outage: last.outage,
            handovers: log.ticks.iter().map(|r| u64::from(r.handovers)).sum(),
            event_counts,
        })
    }
}

/// Hourly windows when they partition the run, else one window.
fn ongrid_window(duration_s: u64) -> Option<u64> {
    match duration_s {
        0 => None,
        d if d % ONGRID_WINDOW_S == 0 => Some(ONGRID_WINDOW_S),
        d => Some(d),
    }
}

/// Runs a simulation and writes every artifact into `out_dir`. Files written
/// so far are removed if anything fails.
pub fn simulate_to_dir(
    run: &SimulationRun,
    manifest: &RunManifest,
    out_dir: &Path,
    trajectory: bool,
) -> Result<RunSummary> {
    let scenario = ResolvedScenario::resolve(&run.config)?;
    let mut staging = Staging::new(out_dir)?;
    let mut sink = TickSink::open(&mut staging, trajectory)?;
    let log = run_with(run, &mut sink)?;
    sink.finish()?;
    let summary = write_outputs(&log, &scenario, run, manifest, &mut staging)?;
    staging.committed = true;
    Ok(summary)
}

fn write_outputs(
    log: &MetricsLog,
    scenario: &ResolvedScenario,
    run: &SimulationRun,
    manifest: &RunManifest,
    staging: &mut Staging,
) -> Result<RunSummary> {
    let layout = File::create(staging.path("layout.csv"))?;
    scenario.layout.write_csv(BufWriter::new(layout))?;

    let summary = RunSummary::new(log, scenario, run)?;
    let mut ongrid = staging.csv("ongrid.csv", &ONGRID_HEADER)?;
    if let Some(w) = summary.ongrid_window_s {
        for (k, kwh) in summary.ongrid_series_kwh.iter().enumerate() {
            let k = k as u64;
            ongrid.write_record([(k * w).to_string(), ((k + 1) * w).to_string(), kwh.to_string()])?;
        }
    }
    ongrid.flush()?;
    staging.json("summary.json", &summary)?;
    staging.json("manifest.json", manifest)?;
    staging.text("config.resolved.toml", &run.config.to_toml_string())?;
    Ok(summary)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgorithmBatch {
    pub algorithm: Algorithm,
    pub mbs_load_share: Distribution,
    pub outage_share: Distribution,
    pub mbs_load_histogram: Histogram,
    pub outage_histogram: Histogram,
}

/// Contents of `batch_summary.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchReport {
    pub schema_version: u32,
    pub tool_version: String,
    pub n_runs: u64,
    pub base_seed: u64,
    pub bins: usize,
    pub algorithms: Vec<AlgorithmBatch>,
}

impl BatchReport {
    /// Histograms share their range across algorithms so they can be
    /// compared bin by bin: `[0, max]` over every run.
    pub fn new(batches: &[BatchSummary], bins: usize) -> Self {
        let top = |f: fn(&crate::engine::RunStats) -> f64| {
            let m = batches
                .iter()
                .flat_map(|b| b.runs.iter().map(f))
                .fold(0.0, f64::max);
            if m > 0.0 {
                m
            } else {
                1.0
            }
        };
        let load_hi = top(|r| r.mbs_load_share);
        let outage_hi = top(|r| r.outage_share);
        let first = batches.first();
        Self {
            schema_version: SCHEMA_VERSION,
            tool_version: TOOL_VERSION.to_string(),
            n_runs: first.map_or(0, |b| b.n_runs),
            base_seed: first.map_or(0, |b| b.base_seed),
            bins,
            algorithms: batches
                .iter()
                .map(|b| AlgorithmBatch {
                    algorithm: b.algorithm,
                    mbs_load_share: b.mbs_load_share,
                    outage_share: b.outage_share,
                    mbs_load_histogram: b.mbs_load_histogram(bins, 0.0, load_hi),
                    outage_histogram: b.outage_histogram(bins, 0.0, outage_hi),
                })
                .collect(),
        }
    }
}

/// Writes `batch.csv`, `histograms.csv`, `batch_summary.json` and the
/// manifest.
pub fn write_batch(
    batches: &[BatchSummary],
    bins: usize,
    manifest: &RunManifest,
    out_dir: &Path,
) -> Result<BatchReport> {
    let mut staging = Staging::new(out_dir)?;
    let report = BatchReport::new(batches, bins);
    let mut runs = staging.csv("batch.csv", &BATCH_HEADER)?;
    for b in batches {
        for r in &b.runs {
            runs.write_record([
                b.algorithm.to_string(),
                r.seed.to_string(),
                r.mbs_load_share.to_string(),
                r.outage_share.to_string(),
                r.served.to_string(),
                r.outage.to_string(),
                r.mbs_rbs.to_string(),
                r.scbs_rbs.to_string(),
            ])?;
        }
    }
    runs.flush()?;
    let mut hist = staging.csv("histograms.csv", &HISTOGRAM_HEADER)?;
    for a in &report.algorithms {
        for (metric, h) in [
            ("mbs_load_share", &a.mbs_load_histogram),
            ("outage_share", &a.outage_histogram),
        ] {
            let edges = h.edges();
            for (k, c) in h.counts.iter().enumerate() {
                hist.write_record([
                    a.algorithm.to_string(),
                    metric.to_string(),
                    k.to_string(),
                    edges[k].to_string(),
                    edges[k + 1].to_string(),
                    c.to_string(),
                ])?;
            }
        }
    }
    hist.flush()?;
    staging.json("batch_summary.json", &report)?;
    staging.json("manifest.json", manifest)?;
    staging.committed = true;
    Ok(report)
}
