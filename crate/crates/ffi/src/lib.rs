//! C ABI over the greenran simulator.
//!
//! Every fallible function returns a [`GreenranStatus`]; on failure the
//! message is available from [`greenran_last_error`] on the same thread.
//! Handles are opaque and owned by the caller once returned; release them
//! with the matching `_free` function. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use greenran::config::{digest, RunManifest, SCHEMA_VERSION, TOOL_VERSION};
use greenran::engine::{run, run_batch, ResolvedScenario, SimulationRun};
use greenran::output::{simulate_to_dir, RunSummary};
use greenran::radio::{coverage_radius, max_data_rate, path_loss_rma};
use greenran::scenario::BaseStationConfig;
use greenran::{Algorithm, Error, SimConfig};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GreenranStatus {
    Ok = 0,
    /// A required pointer argument was NULL.
    NullArgument = 1,
    /// Configuration text or a value failed parsing or validation.
    InvalidConfig = 2,
    /// A model argument lies outside its valid range.
    OutOfDomain = 3,
    /// Reading or writing files failed.
    Io = 4,
    /// Any other failure inside the simulator.
    Runtime = 5,
    /// The simulator panicked; the handle involved should be discarded.
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GreenranAlgorithm {
    Proposed = 0,
    Reference = 1,
}

impl From<GreenranAlgorithm> for Algorithm {
    fn from(a: GreenranAlgorithm) -> Self {
        match a {
            GreenranAlgorithm::Proposed => Algorithm::Proposed,
            GreenranAlgorithm::Reference => Algorithm::Reference,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GreenranStationKind {
    Mbs = 0,
    Scbs = 1,
}

/// Opaque simulation configuration.
pub struct GreenranConfig {
    inner: SimConfig,
}

/// Opaque result of one continuous run.
pub struct GreenranRun {
    summary: RunSummary,
}

/// Headline figures of a run. Energy efficiencies are Mb/s per joule of
/// one tick (per-tick mean) and NaN when the group never drew power.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct GreenranSummary {
    pub duration_s: u64,
    pub tick_s: u64,
    pub n_users: u64,
    pub n_scbs: u64,
    pub mbs_radius_m: f64,
    /// NaN without small cells.
    pub scbs_radius_m: f64,
    pub ee_scbs: f64,
    pub ee_mbs: f64,
    pub ee_total: f64,
    pub on_grid_kwh: f64,
    pub mbs_load_share: f64,
    pub outage_share: f64,
    pub final_served: u64,
    pub final_outage: u64,
    pub handovers: u64,
}

/// Distribution of per-run shares over a static batch.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct GreenranBatchSummary {
    pub n_runs: u64,
    pub mbs_load_share_mean: f64,
    pub mbs_load_share_std: f64,
    pub mbs_load_share_min: f64,
    pub mbs_load_share_max: f64,
    pub outage_share_mean: f64,
    pub outage_share_std: f64,
    pub outage_share_min: f64,
    pub outage_share_max: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(GreenranStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            e if e.is_config() => GreenranStatus::InvalidConfig,
            Error::OutOfDomain { .. } => GreenranStatus::OutOfDomain,
            Error::Io(_) | Error::Csv(_) | Error::Json(_) => GreenranStatus::Io,
            _ => GreenranStatus::Runtime,
        };
        Failure(status, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(GreenranStatus::NullArgument, format!("`{what}` is NULL"))
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> GreenranStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => GreenranStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_last_error(&msg);
            status
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(&format!("panic: {msg}"));
            GreenranStatus::Panic
        }
    }
}

unsafe fn borrow<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn borrow_mut<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| Failure(GreenranStatus::InvalidConfig, format!("`{what}` is not UTF-8: {e}")))
}

fn boxed_config(out: *mut *mut GreenranConfig, cfg: SimConfig) {
    let handle = Box::into_raw(Box::new(GreenranConfig { inner: cfg }));
    // SAFETY: callers check `out` for NULL before building the config.
    unsafe { *out = handle };
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn greenran_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread, or NULL. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn greenran_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Creates the default configuration.
///
/// # Safety
/// `out` must be NULL or point to writable storage for a handle.
#[no_mangle]
pub unsafe extern "C" fn greenran_config_default(out: *mut *mut GreenranConfig) -> GreenranStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        boxed_config(out, SimConfig::default());
        Ok(())
    })
}

/// Parses and validates a TOML configuration.
///
/// # Safety
/// `toml` must be NULL or a NUL-terminated string; `out` must be NULL or
/// point to writable storage for a handle.
#[no_mangle]
pub unsafe extern "C" fn greenran_config_from_toml(
    toml: *const c_char,
    out: *mut *mut GreenranConfig,
) -> GreenranStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let cfg = SimConfig::from_toml_str(text(toml, "toml")?)?;
        boxed_config(out, cfg);
        Ok(())
    })
}

/// Releases a configuration. NULL is ignored.
///
/// # Safety
/// `cfg` must be NULL or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn greenran_config_free(cfg: *mut GreenranConfig) {
    if !cfg.is_null() {
        drop(Box::from_raw(cfg));
    }
}

/// Sets every random seed of the configuration.
///
/// # Safety
/// `cfg` must be NULL or a live configuration handle.
#[no_mangle]
pub unsafe extern "C" fn greenran_config_set_seed(cfg: *mut GreenranConfig, seed: u64) -> GreenranStatus {
    guard(|| {
        let c = borrow_mut(cfg, "cfg")?;
        c.inner = c.inner.clone().with_seed(seed);
        Ok(())
    })
}

/// Sets the simulated duration in seconds. The configuration is left
/// unchanged if the value is rejected.
///
/// # Safety
/// `cfg` must be NULL or a live configuration handle.
#[no_mangle]
pub unsafe extern "C" fn greenran_config_set_duration(
    cfg: *mut GreenranConfig,
    duration_s: u64,
) -> GreenranStatus {
    guard(|| {
        let c = borrow_mut(cfg, "cfg")?;
        let mut next = c.inner.clone();
        next.engine.duration_s = duration_s;
        next.validate()?;
        c.inner = next;
        Ok(())
    })
}

/// Sets the number of users.
///
/// # Safety
/// `cfg` must be NULL or a live configuration handle.
#[no_mangle]
pub unsafe extern "C" fn greenran_config_set_users(cfg: *mut GreenranConfig, n_users: usize) -> GreenranStatus {
    guard(|| {
        borrow_mut(cfg, "cfg")?.inner.scenario.n_users = n_users;
        Ok(())
    })
}

/// Writes the resolved configuration as TOML into `buf` (NUL-terminated,
/// truncated to `cap` bytes) and its full length, without the NUL, into
/// `len`. Pass `cap = 0` to query the length.
///
/// # Safety
/// `cfg` must be a live handle; `buf` must hold `cap` writable bytes (may
/// be NULL when `cap` is 0); `len` must be NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn greenran_config_to_toml(
    cfg: *const GreenranConfig,
    buf: *mut c_char,
    cap: usize,
    len: *mut usize,
) -> GreenranStatus {
    guard(|| {
        let s = borrow(cfg, "cfg")?.inner.to_toml_string();
        if !len.is_null() {
            *len = s.len();
        }
        if cap > 0 {
            if buf.is_null() {
                return Err(null("buf"));
            }
            let n = s.len().min(cap - 1);
            ptr::copy_nonoverlapping(s.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        Ok(())
    })
}

fn summarize(cfg: &SimConfig, alg: Algorithm) -> Result<RunSummary, Failure> {
    let sim = SimulationRun::new(cfg.clone(), alg);
    let log = run(&sim)?;
    let scenario = ResolvedScenario::resolve(cfg)?;
    Ok(RunSummary::new(&log, &scenario, &sim)?)
}

fn boxed_run(out: *mut *mut GreenranRun, summary: RunSummary) {
    let handle = Box::into_raw(Box::new(GreenranRun { summary }));
    // SAFETY: callers check `out` for NULL first.
    unsafe { *out = handle };
}

/// Runs a continuous simulation in memory.
///
/// # Safety
/// `cfg` must be a live handle; `out` must point to writable storage.
#[no_mangle]
pub unsafe extern "C" fn greenran_simulate(
    cfg: *const GreenranConfig,
    algorithm: GreenranAlgorithm,
    out: *mut *mut GreenranRun,
) -> GreenranStatus {
    guard(|| {
        let c = borrow(cfg, "cfg")?;
        if out.is_null() {
            return Err(null("out"));
        }
        boxed_run(out, summarize(&c.inner, algorithm.into())?);
        Ok(())
    })
}

/// Runs a continuous simulation and writes every CSV/JSON artifact and the
/// manifest into `out_dir`. `out` may be NULL when the result is not needed.
///
/// # Safety
/// `cfg` must be a live handle; `out_dir` a NUL-terminated path; `out`
/// NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn greenran_simulate_to_dir(
    cfg: *const GreenranConfig,
    algorithm: GreenranAlgorithm,
    out_dir: *const c_char,
    out: *mut *mut GreenranRun,
) -> GreenranStatus {
    guard(|| {
        let c = borrow(cfg, "cfg")?;
        let dir = text(out_dir, "out_dir")?;
        let alg: Algorithm = algorithm.into();
        let resolved = c.inner.to_toml_string();
        let manifest = RunManifest {
            schema_version: SCHEMA_VERSION,
            tool_version: TOOL_VERSION.to_string(),
            config_digest: digest(resolved.as_bytes()),
            command: "simulate".into(),
            algorithm: Some(alg),
            seed: c.inner.scenario.rng_seed,
            duration_s: c.inner.engine.duration_s,
            runs: None,
            resolved_config: c.inner.clone(),
        };
        let summary = simulate_to_dir(&SimulationRun::new(c.inner.clone(), alg), &manifest, Path::new(dir), false)?;
        if !out.is_null() {
            boxed_run(out, summary);
        }
        Ok(())
    })
}

/// Copies the headline figures of a run.
///
/// # Safety
/// `run` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn greenran_run_summary(run: *const GreenranRun, out: *mut GreenranSummary) -> GreenranStatus {
    guard(|| {
        let s = &borrow(run, "run")?.summary;
        let out = borrow_mut(out, "out")?;
        let r = &s.report;
        *out = GreenranSummary {
            duration_s: s.duration_s,
            tick_s: s.tick_s,
            n_users: s.n_users as u64,
            n_scbs: s.n_scbs as u64,
            mbs_radius_m: s.mbs_radius_m,
            scbs_radius_m: s.scbs_radius_m.unwrap_or(f64::NAN),
            ee_scbs: r.ee_scbs.unwrap_or(f64::NAN),
            ee_mbs: r.ee_mbs.unwrap_or(f64::NAN),
            ee_total: r.ee_total.unwrap_or(f64::NAN),
            on_grid_kwh: r.on_grid_kwh,
            mbs_load_share: r.mbs_load_share,
            outage_share: r.outage_share,
            final_served: s.final_served as u64,
            final_outage: s.final_outage as u64,
            handovers: s.handovers,
        };
        Ok(())
    })
}

/// Copies up to `cap` values of the windowed on-grid energy series (kWh)
/// into `buf` and writes the series length into `len`.
///
/// # Safety
/// `run` must be a live handle; `buf` must hold `cap` doubles (may be NULL
/// when `cap` is 0); `len` must be writable.
#[no_mangle]
pub unsafe extern "C" fn greenran_run_ongrid_series(
    run: *const GreenranRun,
    buf: *mut f64,
    cap: usize,
    len: *mut usize,
) -> GreenranStatus {
    guard(|| {
        let series = &borrow(run, "run")?.summary.ongrid_series_kwh;
        *borrow_mut(len, "len")? = series.len();
        let n = series.len().min(cap);
        if n > 0 {
            if buf.is_null() {
                return Err(null("buf"));
            }
            ptr::copy_nonoverlapping(series.as_ptr(), buf, n);
        }
        Ok(())
    })
}

/// Releases a run result. NULL is ignored.
///
/// # Safety
/// `run` must be NULL or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn greenran_run_free(run: *mut GreenranRun) {
    if !run.is_null() {
        drop(Box::from_raw(run));
    }
}

/// Placement-only runs with seeds `base_seed..base_seed + n_runs`.
///
/// # Safety
/// `cfg` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn greenran_batch(
    cfg: *const GreenranConfig,
    n_runs: u64,
    base_seed: u64,
    algorithm: GreenranAlgorithm,
    out: *mut GreenranBatchSummary,
) -> GreenranStatus {
    guard(|| {
        let c = borrow(cfg, "cfg")?;
        let out = borrow_mut(out, "out")?;
        let b = run_batch(&c.inner, n_runs, base_seed, algorithm.into())?;
        *out = GreenranBatchSummary {
            n_runs: b.n_runs,
            mbs_load_share_mean: b.mbs_load_share.mean,
            mbs_load_share_std: b.mbs_load_share.std,
            mbs_load_share_min: b.mbs_load_share.min,
            mbs_load_share_max: b.mbs_load_share.max,
            outage_share_mean: b.outage_share.mean,
            outage_share_std: b.outage_share.std,
            outage_share_min: b.outage_share.min,
            outage_share_max: b.outage_share.max,
        };
        Ok(())
    })
}

/// Peak data rate in bit/s over `n_prb` resource blocks under the
/// configuration's rate model.
///
/// # Safety
/// `cfg` must be a live handle; `out_bps` must be writable.
#[no_mangle]
pub unsafe extern "C" fn greenran_max_data_rate(
    cfg: *const GreenranConfig,
    n_prb: u32,
    out_bps: *mut f64,
) -> GreenranStatus {
    guard(|| {
        let c = borrow(cfg, "cfg")?;
        *borrow_mut(out_bps, "out_bps")? = max_data_rate(n_prb, &c.inner.rate);
        Ok(())
    })
}

/// RMa LOS path loss in dB.
///
/// # Safety
/// `out_db` must be writable.
#[no_mangle]
pub unsafe extern "C" fn greenran_path_loss_rma(
    d2d_m: f64,
    carrier_ghz: f64,
    h_bs_m: f64,
    h_ue_m: f64,
    out_db: *mut f64,
) -> GreenranStatus {
    guard(|| {
        let out = borrow_mut(out_db, "out_db")?;
        *out = path_loss_rma(d2d_m, carrier_ghz, h_bs_m, h_ue_m)?;
        Ok(())
    })
}

/// Coverage radius in meters of a station kind under the configuration's
/// link budget.
///
/// # Safety
/// `cfg` must be a live handle; `out_m` must be writable.
#[no_mangle]
pub unsafe extern "C" fn greenran_coverage_radius(
    cfg: *const GreenranConfig,
    kind: GreenranStationKind,
    out_m: *mut f64,
) -> GreenranStatus {
    guard(|| {
        let c = &borrow(cfg, "cfg")?.inner;
        let out = borrow_mut(out_m, "out_m")?;
        let pos = c.scenario.mbs_position();
        let mut bs = match kind {
            GreenranStationKind::Mbs => BaseStationConfig::mbs(pos),
            GreenranStationKind::Scbs => BaseStationConfig::scbs(1, pos),
        };
        match kind {
            GreenranStationKind::Mbs => c.mbs.apply(&mut bs),
            GreenranStationKind::Scbs => c.scbs.apply(&mut bs),
        }
        *out = coverage_radius(&bs, &c.link, c.scenario.ue_antenna_height_m);
        Ok(())
    })
}
