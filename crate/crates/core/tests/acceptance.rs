//! Acceptance checks. One line per criterion; the process fails if any
//! criterion fails.

mod common;

use std::fs;
use std::panic::{self, AssertUnwindSafe};
use std::path::Path;
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

use common::oracle::{exhaustive_instances, random_instance, replay};
use common::EnergyLedger;
use greenran::assignment::{plan_user, Outcome};
use greenran::engine::{run_batch, run_with, MetricsLog, ResolvedScenario, Simulation, SimulationRun};
use greenran::metrics::{energy_efficiency, Group};
use greenran::radio::{max_data_rate, RateModelParams};
use greenran::{Algorithm, EnergyEfficiencyReport, SimConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const BATCH_RUNS: u64 = 100;
const BATCH_BASE_SEED: u64 = 1;
const FIG2_MAX_RATIO: f64 = 0.7;
const FIG2_MAX_OUTAGE: f64 = 0.01;
const FIG2_BUDGET: Duration = Duration::from_secs(120);
const CONTINUOUS_S: u64 = 12 * 3600;
const CONTINUOUS_SEED: u64 = 1;
const CONTINUOUS_BUDGET: Duration = Duration::from_secs(300);
const MBS_RADIUS_M: (f64, f64) = (1950.0, 2650.0);
const SCBS_RADIUS_M: (f64, f64) = (420.0, 580.0);
const RATE_MBPS: f64 = 226.9;
const RATE_TOL_MBPS: f64 = 0.1;
const CONSERVATION_S: u64 = 24 * 3600;
const CONSERVATION_SEED: u64 = 3;
const CONSERVATION_REL: f64 = 1e-6;
const GREEN_SNAPSHOTS: usize = 100_000;
const ORACLE_RANDOM_INSTANCES: usize = 20_000;
const DETERMINISM_DURATION: &str = "30m";

struct Report {
    failures: usize,
}

impl Report {
    fn line(&mut self, name: &str, pass: bool, detail: String) {
        if !pass {
            self.failures += 1;
        }
        println!("{} {name}: {detail}", if pass { "PASS" } else { "FAIL" });
    }
}

fn caught<T>(f: impl FnOnce() -> T) -> Result<T, String> {
    panic::catch_unwind(AssertUnwindSafe(f)).map_err(|e| {
        e.downcast_ref::<String>()
            .cloned()
            .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "panic".into())
    })
}

fn static_batch(r: &mut Report, cfg: &SimConfig) {
    let t = Instant::now();
    let p = run_batch(cfg, BATCH_RUNS, BATCH_BASE_SEED, Algorithm::Proposed);
    let q = run_batch(cfg, BATCH_RUNS, BATCH_BASE_SEED, Algorithm::Reference);
    let elapsed = t.elapsed();
    let (p, q) = match (p, q) {
        (Ok(p), Ok(q)) => (p, q),
        (Err(e), _) | (_, Err(e)) => {
            r.line("fig2_direction", false, format!("batch failed: {e}"));
            r.line("fig2_outage", false, "batch failed".into());
            return;
        }
    };
    let (lp, lq) = (p.mbs_load_share.mean, q.mbs_load_share.mean);
    let ratio = lp / lq;
    r.line(
        "fig2_direction",
        lp < lq && ratio <= FIG2_MAX_RATIO && elapsed < FIG2_BUDGET,
        format!(
            "mean MBS load share proposed {lp:.4} vs reference {lq:.4}, ratio {ratio:.3} (need < 1 and <= {FIG2_MAX_RATIO}); {BATCH_RUNS} runs x2 in {:.1} s (budget {} s)",
            elapsed.as_secs_f64(),
            FIG2_BUDGET.as_secs()
        ),
    );
    let (op, oq) = (p.outage_share.mean, q.outage_share.mean);
    r.line(
        "fig2_outage",
        op <= oq && op <= FIG2_MAX_OUTAGE,
        format!("mean outage share proposed {op:.4} vs reference {oq:.4} (need proposed <= reference and <= {FIG2_MAX_OUTAGE})"),
    );
}

struct Continuous {
    report: EnergyEfficiencyReport,
    ledger: EnergyLedger,
    log: MetricsLog,
}

fn continuous(cfg: &SimConfig, alg: Algorithm) -> greenran::Result<Continuous> {
    let mut cfg = cfg.clone().with_seed(CONTINUOUS_SEED);
    cfg.engine.duration_s = CONTINUOUS_S;
    let mut ledger = EnergyLedger::new();
    let log = run_with(&SimulationRun::new(cfg, alg), &mut ledger)?;
    Ok(Continuous {
        report: EnergyEfficiencyReport::from_log(&log),
        ledger,
        log,
    })
}

fn ee(log: &MetricsLog, g: Group) -> f64 {
    energy_efficiency(log, g).map_or(f64::NAN, |e| e.per_tick_mean)
}

fn continuous_runs(r: &mut Report, cfg: &SimConfig) {
    let t = Instant::now();
    let runs = (continuous(cfg, Algorithm::Proposed), continuous(cfg, Algorithm::Reference));
    let elapsed = t.elapsed();
    let (p, q) = match runs {
        (Ok(p), Ok(q)) => (p, q),
        (Err(e), _) | (_, Err(e)) => {
            r.line("table1_ordering", false, format!("run failed: {e}"));
            r.line("fig3_direction", false, "run failed".into());
            return;
        }
    };
    let (sp, sq) = (ee(&p.log, Group::Scbs), ee(&q.log, Group::Scbs));
    let (mp, mq) = (ee(&p.log, Group::Mbs), ee(&q.log, Group::Mbs));
    let (tp, tq) = (ee(&p.log, Group::Total), ee(&q.log, Group::Total));
    r.line(
        "table1_ordering",
        sp > sq && mp < mq && tp > tq && elapsed < CONTINUOUS_BUDGET,
        format!(
            "{} h at 1 s ticks, seed {CONTINUOUS_SEED}: EE_SCBS {sp:.4} > {sq:.4}, EE_MBS {mp:.4} < {mq:.4}, EE_total {tp:.4} > {tq:.4} Mb/J (proposed vs reference); both runs in {:.1} s (budget {} s)",
            CONTINUOUS_S / 3600,
            elapsed.as_secs_f64(),
            CONTINUOUS_BUDGET.as_secs()
        ),
    );
    let (gp, gq) = (p.report.on_grid_kwh, q.report.on_grid_kwh);
    let min_draw = p.ledger.min_ongrid_w.min(q.ledger.min_ongrid_w);
    r.line(
        "fig3_direction",
        gp < gq && min_draw > 0.0,
        format!("cumulative on-grid energy proposed {gp:.3} kWh < reference {gq:.3} kWh; minimum MBS on-grid draw {min_draw:.1} W (need > 0)"),
    );
}

fn coverage(r: &mut Report, cfg: &SimConfig) {
    match ResolvedScenario::resolve(cfg) {
        Ok(s) => {
            let m = s.mbs_radius_m();
            let c = s.scbs_radius_m().unwrap_or(0.0);
            let inside = |x: f64, (lo, hi): (f64, f64)| (lo..=hi).contains(&x);
            r.line(
                "coverage_closure",
                inside(m, MBS_RADIUS_M) && inside(c, SCBS_RADIUS_M),
                format!(
                    "MBS radius {m:.0} m in [{}, {}], SCBS radius {c:.0} m in [{}, {}]",
                    MBS_RADIUS_M.0, MBS_RADIUS_M.1, SCBS_RADIUS_M.0, SCBS_RADIUS_M.1
                ),
            );
        }
        Err(e) => r.line("coverage_closure", false, format!("{e}")),
    }
}

fn rate(r: &mut Report) {
    let p = RateModelParams {
        dl_symbol_fraction: 1.0,
        ..RateModelParams::default()
    };
    let got = max_data_rate(106, &p) / 1e6;
    // hand evaluation: v * Qm * f * Rmax * N_PRB * 12 / Ts(mu=1) * (1 - OH)
    let ts = 1e-3 / (14.0 * 2.0);
    let hand = 1.0 * 8.0 * 1.0 * (948.0 / 1024.0) * (106.0 * 12.0 / ts) * (1.0 - 0.14) / 1e6;
    r.line(
        "rate_formula",
        (got - RATE_MBPS).abs() <= RATE_TOL_MBPS && (got - hand).abs() < 1e-9,
        format!("max_data_rate(106 RB, mu 1, 1 layer, Qm 8, OH 0.14, dl 1) = {got:.3} Mb/s, hand {hand:.3} (need {RATE_MBPS} +/- {RATE_TOL_MBPS})"),
    );
}

fn conservation(r: &mut Report, cfg: &SimConfig) {
    let mut cfg = cfg.clone().with_seed(CONSERVATION_SEED);
    cfg.engine.duration_s = CONSERVATION_S;
    let mut ledger = EnergyLedger::new();
    let t = Instant::now();
    match run_with(&SimulationRun::new(cfg, Algorithm::Proposed), &mut ledger) {
        Ok(_) => {
            r.line(
                "property_energy_conservation",
                ledger.ticks == CONSERVATION_S && ledger.worst_rel <= CONSERVATION_REL && ledger.worst_total_w <= 1e-6,
                format!(
                    "{} ticks of a 24 h run, seed {CONSERVATION_SEED}: worst relative ledger mismatch {:.2e} (need <= {CONSERVATION_REL:e}), worst station/network total mismatch {:.2e} W; {:.1} s",
                    ledger.ticks,
                    ledger.worst_rel,
                    ledger.worst_total_w,
                    t.elapsed().as_secs_f64()
                ),
            );
            r.line(
                "property_battery_bounds",
                ledger.worst_bound_wh == 0.0,
                format!("worst excursion outside [0, capacity] over the same run: {:.2e} Wh", ledger.worst_bound_wh),
            );
        }
        Err(e) => {
            r.line("property_energy_conservation", false, format!("{e}"));
            r.line("property_battery_bounds", false, "run failed".into());
        }
    }
}

fn caps_across_batch(r: &mut Report, cfg: &SimConfig) {
    let mut checked = 0;
    let mut violations = Vec::new();
    let mut peak = (0u32, 0u32, 0u32);
    for alg in [Algorithm::Proposed, Algorithm::Reference] {
        for seed in BATCH_BASE_SEED..BATCH_BASE_SEED + BATCH_RUNS {
            let run = SimulationRun::new(cfg.clone().with_seed(seed), alg);
            let (sim, _) = match Simulation::start(&run) {
                Ok(s) => s,
                Err(e) => {
                    violations.push(format!("{alg} seed {seed}: {e}"));
                    continue;
                }
            };
            let v = sim.view();
            let cap = v.capacity();
            for k in 0..v.n_mbs_sectors() {
                let backhaul: u32 = v.mbs_used(k)
                    + (1..=v.n_scbs())
                        .filter(|&b| v.backhaul_sector(b) == k)
                        .map(|b| v.scbs_used(b))
                        .sum::<u32>();
                peak.0 = peak.0.max(v.mbs_used(k));
                peak.2 = peak.2.max(backhaul);
                if v.mbs_used(k) > cap.mbs_rbs_per_sector[k] || backhaul > cap.backhaul_rbs_per_sector {
                    violations.push(format!("{alg} seed {seed} sector {k}"));
                }
            }
            for b in 1..=v.n_scbs() {
                peak.1 = peak.1.max(v.scbs_used(b));
                if v.scbs_used(b) > cap.scbs_rbs[b - 1] {
                    violations.push(format!("{alg} seed {seed} SCBS {b}"));
                }
            }
            checked += 1;
        }
    }
    r.line(
        "property_rb_and_backhaul_caps",
        violations.is_empty() && checked == 2 * BATCH_RUNS,
        format!(
            "{checked} batch snapshots; peak MBS sector {} RB, peak SCBS {} RB (cap 106), peak sector backhaul {} RB (cap {}); violations {violations:?}",
            peak.0,
            peak.1,
            peak.2,
            27 * 106
        ),
    );
}

fn green_priority(r: &mut Report, cfg: &SimConfig) {
    let mut rng = ChaCha8Rng::seed_from_u64(0x9e37);
    let mut sims = Vec::new();
    for seed in 1..=20 {
        if let Ok((s, _)) = Simulation::start(&SimulationRun::new(cfg.clone().with_seed(seed), Algorithm::Proposed)) {
            sims.push(s);
        }
    }
    let mut checked = 0;
    let mut green_cases = 0;
    let mut bad = Vec::new();
    while checked < GREEN_SNAPSHOTS && !sims.is_empty() {
        let base = &sims[rng.random_range(0..sims.len())];
        let mut view = base.view().clone();
        // random partial network: drop some users, deplete some cells
        let drop_p = rng.random_range(0.0..1.0);
        for u in 0..view.n_users() {
            if rng.random_bool(drop_p) {
                view.detach(u);
            }
        }
        let deplete_p = rng.random_range(0.0..0.5);
        for b in 1..=view.n_scbs() {
            if rng.random_bool(deplete_p) {
                let users: Vec<usize> = view.users_on(b).collect();
                for u in users {
                    view.detach(u);
                }
                view.set_battery_ok(b, false);
            }
        }
        let user = rng.random_range(0..view.n_users());
        view.detach(user);
        let d = view.demand(user);
        let green = (1..=view.n_scbs()).any(|b| {
            view.signal.scbs_snr(user, b) >= view.min_snr_db
                && view.battery_ok(b)
                && view.capacity().scbs_rbs[b - 1] - view.scbs_used(b) >= d
                && view.capacity().backhaul_rbs_per_sector - view.backhaul_used(view.backhaul_sector(b)) >= d
        });
        let decision = plan_user(&view, user);
        if green {
            green_cases += 1;
            if !matches!(decision.outcome, Outcome::ServedByScbs(_)) && bad.len() < 5 {
                bad.push(format!("user {user}: {:?}", decision.outcome));
            }
        }
        checked += 1;
    }
    r.line(
        "property_green_priority",
        checked == GREEN_SNAPSHOTS && bad.is_empty(),
        format!("{checked} randomized snapshots, {green_cases} with a feasible small cell; violations {bad:?}"),
    );
}

fn brute_force(r: &mut Report) {
    let mut exhaustive = 0;
    let mut err = None;
    for inst in exhaustive_instances() {
        let res = caught(|| {
            replay(&inst, Algorithm::Proposed, 1);
            replay(&inst, Algorithm::Reference, 1);
        });
        if let Err(e) = res {
            err = Some(e);
            break;
        }
        exhaustive += 1;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0xb0b);
    let mut random = 0;
    if err.is_none() {
        for _ in 0..ORACLE_RANDOM_INSTANCES {
            let inst = random_instance(&mut rng);
            if let Err(e) = caught(|| {
                replay(&inst, Algorithm::Proposed, 1);
                replay(&inst, Algorithm::Reference, 1);
            }) {
                err = Some(e);
                break;
            }
            random += 1;
        }
    }
    r.line(
        "property_brute_force_oracle",
        err.is_none(),
        format!(
            "{exhaustive} exhaustive instances (2 SCBS, 3 users, 3 SNR levels) and {random} random instances (<= 3 SCBS, <= 5 users) agree decision by decision with rule enumeration{}",
            err.map(|e| format!("; first mismatch: {e}")).unwrap_or_default()
        ),
    );
}

fn dir_bytes(dir: &Path) -> std::io::Result<Vec<(String, Vec<u8>)>> {
    let mut v = Vec::new();
    for e in fs::read_dir(dir)? {
        let e = e?;
        v.push((e.file_name().to_string_lossy().into_owned(), fs::read(e.path())?));
    }
    v.sort();
    Ok(v)
}

fn determinism(r: &mut Report) {
    let result = (|| -> Result<(usize, usize), String> {
        let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
        let exe = env!("CARGO_BIN_EXE_greenran");
        let seed_dir = tmp.path().join("seed");
        let status = Command::new(exe)
            .args(["simulate", "--duration", DETERMINISM_DURATION, "--seed", "11", "--out"])
            .arg(&seed_dir)
            .env_remove("GREENRAN_OUT_ROOT")
            .stdout(Stdio::null())
            .status()
            .map_err(|e| e.to_string())?;
        if !status.success() {
            return Err(format!("seed run exited with {status}"));
        }
        let manifest = seed_dir.join("manifest.json");
        let mut outputs = Vec::new();
        for name in ["a", "b"] {
            let out = tmp.path().join(name);
            let status = Command::new(exe)
                .args(["simulate", "--manifest"])
                .arg(&manifest)
                .arg("--out")
                .arg(&out)
                .env_remove("GREENRAN_OUT_ROOT")
                .stdout(Stdio::null())
                .status()
                .map_err(|e| e.to_string())?;
            if !status.success() {
                return Err(format!("manifest run exited with {status}"));
            }
            outputs.push(dir_bytes(&out).map_err(|e| e.to_string())?);
        }
        let reference = dir_bytes(&seed_dir).map_err(|e| e.to_string())?;
        let bytes: usize = outputs[0].iter().map(|(_, b)| b.len()).sum();
        if outputs[0] != outputs[1] || outputs[0] != reference {
            return Err("outputs differ".into());
        }
        Ok((outputs[0].len(), bytes))
    })();
    match result {
        Ok((files, bytes)) => r.line(
            "determinism",
            files > 0,
            format!("two manifest runs ({DETERMINISM_DURATION}, defaults) and the original produced identical bytes in {files} CSV/JSON/TOML files ({bytes} bytes)"),
        ),
        Err(e) => r.line("determinism", false, e),
    }
}

fn main() {
    let t = Instant::now();
    let cfg = SimConfig::default();
    let mut r = Report { failures: 0 };
    static_batch(&mut r, &cfg);
    continuous_runs(&mut r, &cfg);
    coverage(&mut r, &cfg);
    rate(&mut r);
    conservation(&mut r, &cfg);
    caps_across_batch(&mut r, &cfg);
    green_priority(&mut r, &cfg);
    brute_force(&mut r);
    determinism(&mut r);
    println!(
        "acceptance: {} failed, total {:.1} s",
        r.failures,
        t.elapsed().as_secs_f64()
    );
    if r.failures > 0 {
        std::process::exit(1);
    }
}
