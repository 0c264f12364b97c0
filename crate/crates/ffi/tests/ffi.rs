use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use txopsim_ffi::*;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(txopsim_last_error()) }
        .to_string_lossy()
        .into_owned()
}

const TOY: &str = r#"
room_width_m = 6.0
room_depth_m = 6.0
aps = [{ x = 3.0, y = 3.0 }, { x = 15.0, y = 3.0 }]
stas = [{ x = 2.0, y = 3.0, ap = 0 }, { x = 16.0, y = 2.5, ap = 1 }]
"#;

#[test]
fn evaluate_matches_the_rust_api() {
    unsafe {
        let mut cfg = ptr::null_mut();
        assert_eq!(txopsim_config_new_default(&mut cfg), TxopsimStatus::Ok);
        let mut dep = ptr::null_mut();
        assert_eq!(
            txopsim_deployment_from_toml(c(TOY).as_ptr(), &mut dep),
            TxopsimStatus::Ok
        );
        assert_eq!(txopsim_deployment_num_aps(dep), 2);
        assert_eq!(txopsim_deployment_num_stas(dep), 2);

        let mut report = TxopsimReport::default();
        assert_eq!(
            txopsim_evaluate(cfg, dep, TxopsimPowerPolicy::Variable, &mut report),
            TxopsimStatus::Ok
        );

        let expected = txopsim::Simulator::default()
            .evaluate(
                &txopsim::load_scenario(TOY).unwrap(),
                &txopsim::Mode::ALL,
                txopsim::PowerPolicy::Variable,
            )
            .unwrap();
        let r = |m| expected.report(m).unwrap();
        assert_eq!(report.ncmap_mbps, r(txopsim::Mode::NcMap).aggregate_mbps);
        assert_eq!(
            report.ctdma_sr_mbps,
            r(txopsim::Mode::CTdmaSr).aggregate_mbps
        );
        assert_eq!(
            report.txop_ctdma_us,
            r(txopsim::Mode::CTdma).txop_duration_us.unwrap()
        );
        assert_eq!(report.ctdma_sr_slots, 1);

        txopsim_deployment_free(dep);
        txopsim_config_free(cfg);
    }
}

#[test]
fn generated_deployments_follow_the_seed() {
    unsafe {
        let mut cfg = ptr::null_mut();
        assert_eq!(
            txopsim_config_from_toml(c("[scenario]\nstas_per_ap = 2\n").as_ptr(), &mut cfg),
            TxopsimStatus::Ok
        );
        let (mut a, mut b) = (ptr::null_mut(), ptr::null_mut());
        assert_eq!(
            txopsim_deployment_generate(cfg, 3, 9, &mut a),
            TxopsimStatus::Ok
        );
        assert_eq!(
            txopsim_deployment_generate(cfg, 3, 9, &mut b),
            TxopsimStatus::Ok
        );
        assert_eq!(txopsim_deployment_num_stas(a), 6);
        for sta in 0..6 {
            let (mut xa, mut ya, mut apa) = (0.0, 0.0, 0);
            let (mut xb, mut yb, mut apb) = (0.0, 0.0, 0);
            assert_eq!(
                txopsim_deployment_sta(a, sta, &mut xa, &mut ya, &mut apa),
                TxopsimStatus::Ok
            );
            assert_eq!(
                txopsim_deployment_sta(b, sta, &mut xb, &mut yb, &mut apb),
                TxopsimStatus::Ok
            );
            assert_eq!((xa, ya, apa), (xb, yb, apb));
            assert_eq!(apa, sta / 2);
        }
        let (mut x, mut y, mut ap) = (0.0, 0.0, 0);
        assert_eq!(
            txopsim_deployment_sta(a, 6, &mut x, &mut y, &mut ap),
            TxopsimStatus::InvalidArgument
        );
        assert!(last_error().contains("out of range"));
        txopsim_deployment_free(a);
        txopsim_deployment_free(b);
        txopsim_config_free(cfg);
    }
}

#[test]
fn errors_map_to_status_codes() {
    unsafe {
        let mut cfg = ptr::null_mut();
        assert_eq!(
            txopsim_config_from_toml(c("[radio]\nbogus = 1\n").as_ptr(), &mut cfg),
            TxopsimStatus::Config
        );
        assert!(cfg.is_null());
        assert!(last_error().contains("bogus"));

        assert_eq!(txopsim_config_new_default(&mut cfg), TxopsimStatus::Ok);
        assert_eq!(
            txopsim_config_set(cfg, c("timing.t_sifs_us").as_ptr()),
            TxopsimStatus::Config
        );
        assert_eq!(
            txopsim_config_set(cfg, c("scenario.num_aps=0").as_ptr()),
            TxopsimStatus::Config
        );

        let mut dep = ptr::null_mut();
        assert_eq!(
            txopsim_deployment_from_toml(c("aps = [").as_ptr(), &mut dep),
            TxopsimStatus::Scenario
        );
        assert_eq!(
            txopsim_deployment_from_toml(c(&TOY.replace("x = 2.0", "x = 9.0")).as_ptr(), &mut dep),
            TxopsimStatus::Scenario
        );
        assert_eq!(
            txopsim_deployment_from_toml(c(TOY).as_ptr(), &mut dep),
            TxopsimStatus::Ok
        );

        // A noise floor this high leaves every station unreachable.
        assert_eq!(
            txopsim_config_set(cfg, c("radio.noise_floor_dbm=0").as_ptr()),
            TxopsimStatus::Ok
        );
        let mut report = TxopsimReport::default();
        assert_eq!(
            txopsim_evaluate(cfg, dep, TxopsimPowerPolicy::Fixed, &mut report),
            TxopsimStatus::Runtime
        );
        assert!(last_error().contains("infeasible"));

        txopsim_deployment_free(dep);
        txopsim_config_free(cfg);
    }
}

#[test]
fn null_and_invalid_arguments() {
    unsafe {
        assert_eq!(
            txopsim_config_new_default(ptr::null_mut()),
            TxopsimStatus::NullPointer
        );
        let mut cfg = ptr::null_mut();
        assert_eq!(
            txopsim_config_from_toml(ptr::null(), &mut cfg),
            TxopsimStatus::NullPointer
        );
        let bad = [0xffu8, 0xfe, 0];
        assert_eq!(
            txopsim_config_from_toml(bad.as_ptr().cast(), &mut cfg),
            TxopsimStatus::InvalidArgument
        );
        let mut report = TxopsimReport::default();
        assert_eq!(
            txopsim_evaluate(
                ptr::null(),
                ptr::null(),
                TxopsimPowerPolicy::Variable,
                &mut report
            ),
            TxopsimStatus::NullPointer
        );
        assert_eq!(txopsim_deployment_num_stas(ptr::null()), 0);
        txopsim_config_free(ptr::null_mut());
        txopsim_deployment_free(ptr::null_mut());
    }
}

#[test]
fn version_is_the_package_version() {
    let v = unsafe { CStr::from_ptr(txopsim_version()) }
        .to_str()
        .unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

/// Compiles and runs a C program against the generated header and the
/// static library. Skipped when no C compiler or archive is available.
#[test]
fn c_program_links_and_runs() {
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let target_dir = std::env::current_exe()
        .unwrap()
        .parent()
        .unwrap()
        .parent()
        .unwrap()
        .to_path_buf();
    let archive = target_dir.join("libtxopsim_ffi.a");
    if !archive.exists() || Command::new("cc").arg("--version").output().is_err() {
        eprintln!("skipping: no C compiler or {} missing", archive.display());
        return;
    }
    let out = tempfile::tempdir().unwrap();
    let exe = out.path().join("smoke");
    let status = Command::new("cc")
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(manifest.join("tests/c/smoke.c"))
        .arg(&archive)
        .args(["-lpthread", "-ldl", "-lm"])
        .arg("-o")
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success(), "C compilation failed");
    let run = Command::new(&exe).output().unwrap();
    assert!(
        run.status.success(),
        "C program exited with {:?}",
        run.status.code()
    );
    let stdout = String::from_utf8(run.stdout).unwrap();
    assert!(stdout.starts_with(env!("CARGO_PKG_VERSION")), "{stdout}");
}
