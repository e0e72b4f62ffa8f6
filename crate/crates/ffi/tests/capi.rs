use std::ffi::{CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use greenran_ffi::*;

fn last_error() -> String {
    let p = greenran_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn config(toml: &str) -> *mut GreenranConfig {
    let text = CString::new(toml).unwrap();
    let mut cfg = ptr::null_mut();
    let st = unsafe { greenran_config_from_toml(text.as_ptr(), &mut cfg) };
    assert_eq!(st, GreenranStatus::Ok, "{}", last_error());
    cfg
}

#[test]
fn version_matches_the_crate() {
    let v = unsafe { CStr::from_ptr(greenran_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn null_arguments_are_reported() {
    unsafe {
        assert_eq!(greenran_config_default(ptr::null_mut()), GreenranStatus::NullArgument);
        assert!(last_error().contains("out"));
        let mut cfg = ptr::null_mut();
        assert_eq!(greenran_config_from_toml(ptr::null(), &mut cfg), GreenranStatus::NullArgument);
        assert!(cfg.is_null());
        assert_eq!(greenran_config_set_seed(ptr::null_mut(), 1), GreenranStatus::NullArgument);
        let mut run = ptr::null_mut();
        assert_eq!(
            greenran_simulate(ptr::null(), GreenranAlgorithm::Proposed, &mut run),
            GreenranStatus::NullArgument
        );
        let mut s = GreenranSummary::default();
        assert_eq!(greenran_run_summary(ptr::null(), &mut s), GreenranStatus::NullArgument);
        assert_eq!(greenran_path_loss_rma(100.0, 3.5, 35.0, 1.5, ptr::null_mut()), GreenranStatus::NullArgument);
        greenran_config_free(ptr::null_mut());
        greenran_run_free(ptr::null_mut());
    }
}

#[test]
fn bad_configuration_text_is_rejected() {
    for (toml, needle) in [
        ("[link]\nnoise_figure = 7.0\n", "noise_figure"),
        ("[battery]\ncapacity_wh = -1.0\n", "battery.capacity_wh"),
        ("not toml at all [", ""),
    ] {
        let text = CString::new(toml).unwrap();
        let mut cfg = ptr::null_mut();
        let st = unsafe { greenran_config_from_toml(text.as_ptr(), &mut cfg) };
        assert_eq!(st, GreenranStatus::InvalidConfig, "{toml}");
        assert!(cfg.is_null());
        assert!(last_error().contains(needle), "{}", last_error());
    }
}

#[test]
fn rejected_duration_leaves_config_unchanged() {
    let cfg = config("");
    unsafe {
        assert_eq!(greenran_config_set_duration(cfg, 600), GreenranStatus::Ok);
        let mut len = 0;
        assert_eq!(greenran_config_to_toml(cfg, ptr::null_mut(), 0, &mut len), GreenranStatus::Ok);
        let mut buf = vec![0 as std::ffi::c_char; len + 1];
        assert_eq!(greenran_config_to_toml(cfg, buf.as_mut_ptr(), buf.len(), ptr::null_mut()), GreenranStatus::Ok);
        let text = CStr::from_ptr(buf.as_ptr()).to_str().unwrap().to_string();
        assert_eq!(text.len(), len);
        assert!(text.contains("duration_s = 600"), "{text}");

        let mut short = [1 as std::ffi::c_char; 4];
        assert_eq!(greenran_config_to_toml(cfg, short.as_mut_ptr(), 4, ptr::null_mut()), GreenranStatus::Ok);
        assert_eq!(short[3], 0);
        greenran_config_free(cfg);
    }
}

#[test]
fn simulate_reports_a_consistent_summary() {
    let cfg = config("[scenario]\nn_users = 60\n[engine]\nduration_s = 1200\n");
    unsafe {
        greenran_config_set_seed(cfg, 4);
        let mut runs = [ptr::null_mut(); 2];
        for (alg, slot) in [GreenranAlgorithm::Proposed, GreenranAlgorithm::Reference].into_iter().zip(&mut runs) {
            assert_eq!(greenran_simulate(cfg, alg, slot), GreenranStatus::Ok, "{}", last_error());
        }
        for run in runs {
            let mut s = GreenranSummary::default();
            assert_eq!(greenran_run_summary(run, &mut s), GreenranStatus::Ok);
            assert_eq!((s.duration_s, s.tick_s, s.n_users), (1200, 1, 60));
            assert_eq!(s.final_served + s.final_outage, 60);
            assert!((0.0..=1.0).contains(&s.mbs_load_share));
            assert!((0.0..=1.0).contains(&s.outage_share));
            assert!(s.on_grid_kwh > 0.0);
            assert!(s.mbs_radius_m > s.scbs_radius_m);

            let mut len = 0;
            assert_eq!(greenran_run_ongrid_series(run, ptr::null_mut(), 0, &mut len), GreenranStatus::Ok);
            let mut series = vec![f64::NAN; len];
            assert_eq!(greenran_run_ongrid_series(run, series.as_mut_ptr(), len, &mut len), GreenranStatus::Ok);
            assert!(series.iter().all(|v| v.is_finite() && *v >= 0.0));
            assert!(series.iter().sum::<f64>() <= s.on_grid_kwh * (1.0 + 1e-9));
            greenran_run_free(run);
        }

        let mut again = ptr::null_mut();
        greenran_simulate(cfg, GreenranAlgorithm::Proposed, &mut again);
        let mut a = GreenranSummary::default();
        greenran_run_summary(again, &mut a);
        let mut b = GreenranSummary::default();
        let mut third = ptr::null_mut();
        greenran_simulate(cfg, GreenranAlgorithm::Proposed, &mut third);
        greenran_run_summary(third, &mut b);
        assert_eq!(a.on_grid_kwh.to_bits(), b.on_grid_kwh.to_bits());
        assert_eq!(a.handovers, b.handovers);
        greenran_run_free(again);
        greenran_run_free(third);
        greenran_config_free(cfg);
    }
}

#[test]
fn simulate_to_dir_writes_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let path = CString::new(out.to_str().unwrap()).unwrap();
    let cfg = config("[scenario]\nn_users = 40\n[engine]\nduration_s = 60\n");
    unsafe {
        assert_eq!(
            greenran_simulate_to_dir(cfg, GreenranAlgorithm::Reference, path.as_ptr(), ptr::null_mut()),
            GreenranStatus::Ok,
            "{}",
            last_error()
        );
        for f in ["summary.json", "manifest.json", "network.csv", "energy.csv", "ongrid.csv", "config.resolved.toml"] {
            assert!(out.join(f).is_file(), "{f}");
        }
        let blocked = dir.path().join("file");
        std::fs::write(&blocked, "x").unwrap();
        let path = CString::new(blocked.to_str().unwrap()).unwrap();
        assert_eq!(
            greenran_simulate_to_dir(cfg, GreenranAlgorithm::Reference, path.as_ptr(), ptr::null_mut()),
            GreenranStatus::Io
        );
        greenran_config_free(cfg);
    }
}

#[test]
fn batch_summarises_every_run() {
    let cfg = config("");
    unsafe {
        let mut b = GreenranBatchSummary::default();
        assert_eq!(greenran_batch(cfg, 8, 1, GreenranAlgorithm::Proposed, &mut b), GreenranStatus::Ok);
        assert_eq!(b.n_runs, 8);
        assert!(b.mbs_load_share_min <= b.mbs_load_share_mean && b.mbs_load_share_mean <= b.mbs_load_share_max);
        assert!(b.outage_share_min <= b.outage_share_mean && b.outage_share_mean <= b.outage_share_max);
        assert!(b.mbs_load_share_std >= 0.0);
        assert_ne!(greenran_batch(cfg, 0, 1, GreenranAlgorithm::Proposed, &mut b), GreenranStatus::Ok);
        greenran_config_free(cfg);
    }
}

#[test]
fn model_functions() {
    let cfg = config("[rate]\ndl_symbol_fraction = 1.0\n");
    unsafe {
        let mut bps = 0.0;
        assert_eq!(greenran_max_data_rate(cfg, 106, &mut bps), GreenranStatus::Ok);
        assert!((bps / 1e6 - 226.9).abs() <= 0.1, "{bps}");

        let mut mbs = 0.0;
        let mut scbs = 0.0;
        assert_eq!(greenran_coverage_radius(cfg, GreenranStationKind::Mbs, &mut mbs), GreenranStatus::Ok);
        assert_eq!(greenran_coverage_radius(cfg, GreenranStationKind::Scbs, &mut scbs), GreenranStatus::Ok);
        assert!((1950.0..=2650.0).contains(&mbs), "{mbs}");
        assert!((420.0..=580.0).contains(&scbs), "{scbs}");

        let mut near = 0.0;
        let mut far = 0.0;
        assert_eq!(greenran_path_loss_rma(100.0, 3.5, 35.0, 1.5, &mut near), GreenranStatus::Ok);
        assert_eq!(greenran_path_loss_rma(1000.0, 3.5, 35.0, 1.5, &mut far), GreenranStatus::Ok);
        assert!(far > near && near > 80.0);
        let mut x = 0.0;
        assert_eq!(greenran_path_loss_rma(1e9, 3.5, 35.0, 1.5, &mut x), GreenranStatus::OutOfDomain);
        greenran_config_free(cfg);
    }
}

#[test]
fn generated_header_declares_the_api_and_compiles() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/greenran.h");
    let text = std::fs::read_to_string(&header).expect("header generated by build script");
    for name in [
        "greenran_version", "greenran_last_error", "greenran_config_default", "greenran_config_from_toml",
        "greenran_config_free", "greenran_simulate", "greenran_simulate_to_dir", "greenran_run_summary",
        "greenran_run_free", "greenran_batch", "greenran_max_data_rate", "greenran_path_loss_rma",
        "greenran_coverage_radius", "GREENRAN_STATUS_INVALID_CONFIG", "typedef struct GreenranConfig GreenranConfig",
    ] {
        assert!(text.contains(name), "{name}");
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("use.c");
    std::fs::write(
        &src,
        "#include \"greenran.h\"\nint main(void) { GreenranConfig *c = 0; \
         GreenranStatus s = greenran_config_default(&c); greenran_config_free(c); return (int)s; }\n",
    )
    .unwrap();
    let inc = header.parent().unwrap();
    match Command::new("cc").arg("-fsyntax-only").arg("-Wall").arg("-Werror").arg("-I").arg(inc).arg(&src).status() {
        Ok(st) => assert!(st.success(), "header does not compile"),
        Err(e) => eprintln!("no C compiler available, header compile check skipped: {e}"),
    }
}
