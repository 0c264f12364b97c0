//! C ABI for txopsim.
//!
//! Objects are exposed as opaque handles created by `*_new`/`*_from_*`
//! functions and released with the matching `*_free`. Every fallible call
//! returns a [`TxopsimStatus`]; on failure a description is available from
//! [`txopsim_last_error`] on the same thread until the next failing call.
//! Panics never cross the boundary: they are reported as
//! `TXOPSIM_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use txopsim::{
    generate_deployment, load_scenario, Deployment, Error, Mode, PowerPolicy, ScenarioConfig,
    SimConfig, Simulator,
};

/// Result of a C API call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TxopsimStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// A string argument was not valid UTF-8 or an index was out of range.
    InvalidArgument = 2,
    /// Invalid configuration or override.
    Config = 3,
    /// A scenario document failed to parse or validate.
    Scenario = 4,
    /// Evaluation failed (for example an unreachable station).
    Runtime = 5,
    /// An internal panic was caught.
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TxopsimPowerPolicy {
    /// Every AP transmits at the maximum power level.
    Fixed = 0,
    /// Every configured power level is considered.
    Variable = 1,
}

/// Throughput of the three access modes on one deployment.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct TxopsimReport {
    pub ncmap_mbps: f64,
    pub ctdma_mbps: f64,
    pub ctdma_sr_mbps: f64,
    /// Gains over nc-MAP in percent.
    pub gain_ctdma_pct: f64,
    pub gain_ctdma_sr_pct: f64,
    pub txop_ctdma_us: f64,
    pub txop_ctdma_sr_us: f64,
    pub ctdma_sr_slots: usize,
}

/// Opaque simulation configuration.
pub struct TxopsimConfig {
    inner: SimConfig,
}

/// Opaque deployment (AP and station positions with association).
pub struct TxopsimDeployment {
    inner: Deployment,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> TxopsimStatus {
    match e {
        Error::Config(_) => TxopsimStatus::Config,
        Error::ScenarioParse(_) | Error::ScenarioInvalid(_) => TxopsimStatus::Scenario,
        _ => TxopsimStatus::Runtime,
    }
}

fn fail(status: TxopsimStatus, msg: &str) -> TxopsimStatus {
    set_last_error(msg);
    status
}

/// Runs `f`, converting errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), TxopsimStatus>) -> TxopsimStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => TxopsimStatus::Ok,
        Ok(Err(status)) => status,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| (*s).to_owned())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".to_owned());
            fail(TxopsimStatus::Panic, &format!("internal panic: {msg}"))
        }
    }
}

fn lib_err(e: Error) -> TxopsimStatus {
    fail(status_of(&e), &e.to_string())
}

unsafe fn str_arg<'a>(p: *const c_char, name: &str) -> Result<&'a str, TxopsimStatus> {
    if p.is_null() {
        return Err(fail(TxopsimStatus::NullPointer, &format!("{name} is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        fail(
            TxopsimStatus::InvalidArgument,
            &format!("{name} is not valid UTF-8"),
        )
    })
}

unsafe fn ref_arg<'a, T>(p: *const T, name: &str) -> Result<&'a T, TxopsimStatus> {
    p.as_ref()
        .ok_or_else(|| fail(TxopsimStatus::NullPointer, &format!("{name} is null")))
}

unsafe fn out_arg<'a, T>(p: *mut T, name: &str) -> Result<&'a mut T, TxopsimStatus> {
    p.as_mut()
        .ok_or_else(|| fail(TxopsimStatus::NullPointer, &format!("{name} is null")))
}

/// Package version of the library. The string is static; do not free it.
#[no_mangle]
pub extern "C" fn txopsim_version() -> *const c_char {
    static VERSION: &CStr =
        match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
            Ok(v) => v,
            Err(_) => panic!("version contains a nul byte"),
        };
    VERSION.as_ptr()
}

/// Message describing the most recent failure on the calling thread (empty if
/// none). Valid until the next failing call on this thread; do not free.
#[no_mangle]
pub extern "C" fn txopsim_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Creates a configuration with every default value.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for a handle.
#[no_mangle]
pub unsafe extern "C" fn txopsim_config_new_default(out: *mut *mut TxopsimConfig) -> TxopsimStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = Box::into_raw(Box::new(TxopsimConfig {
            inner: SimConfig::default(),
        }));
        Ok(())
    })
}

/// Parses a TOML configuration document; omitted fields take defaults.
///
/// # Safety
/// `toml` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn txopsim_config_from_toml(
    toml: *const c_char,
    out: *mut *mut TxopsimConfig,
) -> TxopsimStatus {
    guard(|| {
        let text = str_arg(toml, "toml")?;
        let out = out_arg(out, "out")?;
        let inner = SimConfig::from_toml_str(text).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(TxopsimConfig { inner }));
        Ok(())
    })
}

/// Applies a `section.key=value` override. On failure the configuration is
/// left unchanged.
///
/// # Safety
/// `config` must be a live handle and `assignment` a nul-terminated string.
#[no_mangle]
pub unsafe extern "C" fn txopsim_config_set(
    config: *mut TxopsimConfig,
    assignment: *const c_char,
) -> TxopsimStatus {
    guard(|| {
        let cfg = out_arg(config, "config")?;
        let a = str_arg(assignment, "assignment")?;
        cfg.inner.apply_override(a).map_err(lib_err)
    })
}

/// Releases a configuration. Null is ignored.
///
/// # Safety
/// `config` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn txopsim_config_free(config: *mut TxopsimConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

/// Draws a random deployment using the configuration's scenario section with
/// the given AP count and seed.
///
/// # Safety
/// `config` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn txopsim_deployment_generate(
    config: *const TxopsimConfig,
    num_aps: usize,
    seed: u64,
    out: *mut *mut TxopsimDeployment,
) -> TxopsimStatus {
    guard(|| {
        let cfg = ref_arg(config, "config")?;
        let out = out_arg(out, "out")?;
        let scenario = ScenarioConfig {
            num_aps,
            seed,
            ..cfg.inner.scenario.clone()
        };
        let inner = generate_deployment(&scenario).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(TxopsimDeployment { inner }));
        Ok(())
    })
}

/// Loads a scenario document (TOML with `aps` and `stas` arrays).
///
/// # Safety
/// `toml` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn txopsim_deployment_from_toml(
    toml: *const c_char,
    out: *mut *mut TxopsimDeployment,
) -> TxopsimStatus {
    guard(|| {
        let text = str_arg(toml, "toml")?;
        let out = out_arg(out, "out")?;
        let inner = load_scenario(text).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(TxopsimDeployment { inner }));
        Ok(())
    })
}

/// Releases a deployment. Null is ignored.
///
/// # Safety
/// `deployment` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn txopsim_deployment_free(deployment: *mut TxopsimDeployment) {
    if !deployment.is_null() {
        drop(Box::from_raw(deployment));
    }
}

/// Number of APs, or 0 for a null handle.
///
/// # Safety
/// `deployment` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn txopsim_deployment_num_aps(deployment: *const TxopsimDeployment) -> usize {
    deployment.as_ref().map_or(0, |d| d.inner.num_aps())
}

/// Number of stations, or 0 for a null handle.
///
/// # Safety
/// `deployment` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn txopsim_deployment_num_stas(
    deployment: *const TxopsimDeployment,
) -> usize {
    deployment.as_ref().map_or(0, |d| d.inner.num_stas())
}

/// Position of station `sta` in meters and the index of its AP.
///
/// # Safety
/// `deployment` must be a live handle; the output pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn txopsim_deployment_sta(
    deployment: *const TxopsimDeployment,
    sta: usize,
    x: *mut f64,
    y: *mut f64,
    ap: *mut usize,
) -> TxopsimStatus {
    guard(|| {
        let d = &ref_arg(deployment, "deployment")?.inner;
        let (x, y, ap) = (out_arg(x, "x")?, out_arg(y, "y")?, out_arg(ap, "ap")?);
        if sta >= d.num_stas() {
            return Err(fail(
                TxopsimStatus::InvalidArgument,
                &format!("station {sta} out of range ({} stations)", d.num_stas()),
            ));
        }
        let p = d.sta_positions()[sta];
        (*x, *y, *ap) = (p.x, p.y, d.ap_of(sta));
        Ok(())
    })
}

/// Evaluates nc-MAP, c-TDMA and c-TDMA/SR on a deployment.
///
/// # Safety
/// `config` and `deployment` must be live handles; `report` must be valid.
#[no_mangle]
pub unsafe extern "C" fn txopsim_evaluate(
    config: *const TxopsimConfig,
    deployment: *const TxopsimDeployment,
    policy: TxopsimPowerPolicy,
    report: *mut TxopsimReport,
) -> TxopsimStatus {
    guard(|| {
        let cfg = &ref_arg(config, "config")?.inner;
        let dep = &ref_arg(deployment, "deployment")?.inner;
        let report = out_arg(report, "report")?;
        let policy = match policy {
            TxopsimPowerPolicy::Fixed => PowerPolicy::Fixed,
            TxopsimPowerPolicy::Variable => PowerPolicy::Variable,
        };
        let sim = Simulator::from_config(cfg).map_err(lib_err)?;
        let eval = sim.evaluate(dep, &Mode::ALL, policy).map_err(lib_err)?;
        let r = |m: Mode| eval.report(m).expect("every mode was evaluated");
        let gain = |m: Mode| eval.gain_vs_ncmap(m).unwrap_or(f64::NAN);
        *report = TxopsimReport {
            ncmap_mbps: r(Mode::NcMap).aggregate_mbps,
            ctdma_mbps: r(Mode::CTdma).aggregate_mbps,
            ctdma_sr_mbps: r(Mode::CTdmaSr).aggregate_mbps,
            gain_ctdma_pct: gain(Mode::CTdma),
            gain_ctdma_sr_pct: gain(Mode::CTdmaSr),
            txop_ctdma_us: r(Mode::CTdma).txop_duration_us.unwrap_or(f64::NAN),
            txop_ctdma_sr_us: r(Mode::CTdmaSr).txop_duration_us.unwrap_or(f64::NAN),
            ctdma_sr_slots: r(Mode::CTdmaSr).num_coordinated_slots.unwrap_or(0),
        };
        Ok(())
    })
}
