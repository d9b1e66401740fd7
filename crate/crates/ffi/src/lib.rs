//! C ABI for `monotangle`.
//!
//! States and roof configurations are opaque heap handles created by the
//! `mt_*_new`/`mt_*_from_*` functions and released with the matching
//! `*_free`. Every fallible call returns an [`MtStatus`]; on failure,
//! [`mt_last_error_message`] describes the error for the calling thread.
//! Strings returned through out-parameters are owned by the caller and must
//! be released with [`mt_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use monotangle::monogamy::{ckw_residual, sm_residual, MonogamyConfig};
use monotangle::tangle::{n_tangle_pure, one_tangle, two_tangle};
use monotangle::wclass::{wclass_random, wclass_state};
use monotangle::{Error, NTangle, QubitSubset, RoofConfig, StateVector, WClassParams, C64};

/// Result codes of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MtStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidState = 2,
    InvalidInput = 3,
    Unsupported = 4,
    Json = 5,
    Io = 6,
    Utf8 = 7,
    Panic = 8,
}

/// Normalized pure state.
pub struct MtState(StateVector);

/// Roof search settings plus verdict tolerances for strong-monogamy checks.
pub struct MtRoofConfig(MonogamyConfig);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

struct Failure(MtStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::InvalidState(_) => MtStatus::InvalidState,
            Error::Input(_) => MtStatus::InvalidInput,
            Error::Unsupported(_) => MtStatus::Unsupported,
            Error::Json(_) => MtStatus::Json,
            Error::Io(_) | Error::Csv(_) => MtStatus::Io,
        };
        Failure(status, e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure(MtStatus::Json, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(MtStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, recording any failure or panic as the thread's last error.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> MtStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            MtStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            MtStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn write<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

unsafe fn c_str<'a>(s: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if s.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|e| Failure(MtStatus::Utf8, format!("{what}: {e}")))
}

unsafe fn complex_slice(re: *const f64, im: *const f64, len: usize, what: &str) -> Result<Vec<C64>, Failure> {
    if len == 0 {
        return Ok(Vec::new());
    }
    if re.is_null() || im.is_null() {
        return Err(null(what));
    }
    let re = std::slice::from_raw_parts(re, len);
    let im = std::slice::from_raw_parts(im, len);
    Ok(re.iter().zip(im).map(|(&r, &i)| C64::new(r, i)).collect())
}

fn into_c_string(s: String) -> Result<*mut c_char, Failure> {
    CString::new(s)
        .map(CString::into_raw)
        .map_err(|e| Failure(MtStatus::Utf8, e.to_string()))
}

fn boxed_state(state: StateVector) -> *mut MtState {
    Box::into_raw(Box::new(MtState(state)))
}

fn config_or_default(config: *const MtRoofConfig) -> MonogamyConfig {
    // SAFETY: callers pass either null or a handle from this library.
    unsafe { config.as_ref() }.map(|c| c.0.clone()).unwrap_or_default()
}

/// Message of the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call into this library on the
/// same thread.
#[no_mangle]
pub extern "C" fn mt_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn mt_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must be null or a string obtained from this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn mt_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// State from `len = 2^num_qubits` amplitudes given as separate real and
/// imaginary arrays. Unnormalized input is renormalized.
///
/// # Safety
/// `re` and `im` must point to `len` readable doubles; `out` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn mt_state_from_amplitudes(
    num_qubits: usize,
    re: *const f64,
    im: *const f64,
    len: usize,
    out: *mut *mut MtState,
) -> MtStatus {
    guard(|| {
        let amps = complex_slice(re, im, len, "amplitudes")?;
        let state = StateVector::new(num_qubits, amps)?;
        write(out, boxed_state(state), "out")
    })
}

/// State from `{"num_qubits": n, "amplitudes": [[re, im], ...]}`.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mt_state_from_json(json: *const c_char, out: *mut *mut MtState) -> MtStatus {
    guard(|| {
        let state = StateVector::from_json(c_str(json, "json")?)?;
        write(out, boxed_state(state), "out")
    })
}

/// Generalized W-class state `a|0...0> + sum_k b_k |0..1_k..0>` on
/// `n = b_len` qubits; the coefficients must be normalized.
///
/// # Safety
/// `b_re` and `b_im` must point to `b_len` readable doubles; `out` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn mt_state_wclass(
    a_re: f64,
    a_im: f64,
    b_re: *const f64,
    b_im: *const f64,
    b_len: usize,
    out: *mut *mut MtState,
) -> MtStatus {
    guard(|| {
        let b = complex_slice(b_re, b_im, b_len, "b")?;
        let params = WClassParams::new(C64::new(a_re, a_im), b)?;
        write(out, boxed_state(wclass_state(&params)), "out")
    })
}

/// Seeded random W-class state on `n` qubits.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mt_state_wclass_random(n: usize, seed: u64, out: *mut *mut MtState) -> MtStatus {
    guard(|| {
        let params = wclass_random(n, seed)?;
        write(out, boxed_state(wclass_state(&params)), "out")
    })
}

/// # Safety
/// `state` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mt_state_num_qubits(state: *const MtState, out: *mut usize) -> MtStatus {
    guard(|| write(out, deref(state, "state")?.0.num_qubits(), "out"))
}

/// JSON text of the state; free with [`mt_string_free`].
///
/// # Safety
/// `state` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mt_state_to_json(state: *const MtState, out: *mut *mut c_char) -> MtStatus {
    guard(|| {
        let json = deref(state, "state")?.0.to_json()?;
        write(out, into_c_string(json)?, "out")
    })
}

/// Releases a state. Null is ignored.
///
/// # Safety
/// `state` must be null or a handle from this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn mt_state_free(state: *mut MtState) {
    if !state.is_null() {
        drop(Box::from_raw(state));
    }
}

/// Default roof settings (seed 0, 32 restarts, padding 2) and tolerances.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mt_roof_config_new(out: *mut *mut MtRoofConfig) -> MtStatus {
    guard(|| write(out, Box::into_raw(Box::new(MtRoofConfig(MonogamyConfig::default()))), "out"))
}

/// Roof settings from `{"seed", "restarts", "padding", "max_sweeps", "tol"}`;
/// omitted fields keep their defaults.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mt_roof_config_from_json(json: *const c_char, out: *mut *mut MtRoofConfig) -> MtStatus {
    guard(|| {
        let roof: RoofConfig = serde_json::from_str(c_str(json, "json")?)?;
        roof.validate()?;
        let config = MonogamyConfig {
            tangle: NTangle::new(roof),
            ..MonogamyConfig::default()
        };
        write(out, Box::into_raw(Box::new(MtRoofConfig(config))), "out")
    })
}

/// # Safety
/// `config` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn mt_roof_config_set_seed(config: *mut MtRoofConfig, seed: u64) -> MtStatus {
    guard(|| {
        config.as_mut().ok_or_else(|| null("config"))?.0.tangle.roof.seed = seed;
        Ok(())
    })
}

/// # Safety
/// `config` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn mt_roof_config_set_restarts(config: *mut MtRoofConfig, restarts: usize) -> MtStatus {
    guard(|| {
        config.as_mut().ok_or_else(|| null("config"))?.0.tangle.roof.restarts = restarts;
        Ok(())
    })
}

/// Verdict tolerances for closed-form-only and roof-containing residuals.
///
/// # Safety
/// `config` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn mt_roof_config_set_tolerances(config: *mut MtRoofConfig, closed: f64, roof: f64) -> MtStatus {
    guard(|| {
        let c = config.as_mut().ok_or_else(|| null("config"))?;
        if !(closed >= 0.0 && roof >= 0.0) {
            return Err(Failure(MtStatus::InvalidInput, "tolerances must be nonnegative".into()));
        }
        c.0.tolerances.closed = closed;
        c.0.tolerances.roof = roof;
        Ok(())
    })
}

/// Releases a configuration. Null is ignored.
///
/// # Safety
/// `config` must be null or a handle from this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn mt_roof_config_free(config: *mut MtRoofConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

/// `tau(focus | rest)` of a pure state; labels are 1-based.
///
/// # Safety
/// `state` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mt_one_tangle(state: *const MtState, focus: usize, out: *mut f64) -> MtStatus {
    guard(|| write(out, one_tangle(&deref(state, "state")?.0, focus)?.value, "out"))
}

/// Squared concurrence of the two-qubit reduction on labels `a` and `b`.
///
/// # Safety
/// `state` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mt_two_tangle(state: *const MtState, a: usize, b: usize, out: *mut f64) -> MtStatus {
    guard(|| {
        let rho = deref(state, "state")?.0.reduce(&QubitSubset::new([a, b])?)?;
        write(out, two_tangle(&rho)?.value, "out")
    })
}

/// One-tangle of `focus` minus all its two-tangles.
///
/// # Safety
/// `state` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mt_ckw_residual(state: *const MtState, focus: usize, out: *mut f64) -> MtStatus {
    guard(|| write(out, ckw_residual(&deref(state, "state")?.0, focus)?, "out"))
}

/// n-tangle of the whole state with hub `focus`. `config` may be null for
/// defaults; `converged` may be null.
///
/// # Safety
/// `state` must be a live handle, `config` null or live; `out` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn mt_n_tangle(
    state: *const MtState,
    focus: usize,
    config: *const MtRoofConfig,
    out: *mut f64,
    converged: *mut bool,
) -> MtStatus {
    guard(|| {
        let state = &deref(state, "state")?.0;
        let partners = QubitSubset::new((1..=state.num_qubits()).filter(|&l| l != focus))?;
        let outcome = n_tangle_pure(state, focus, &partners, &config_or_default(config).tangle)?;
        if !converged.is_null() {
            converged.write(outcome.converged);
        }
        write(out, outcome.tangle.value, "out")
    })
}

/// Strong-monogamy report for hub `focus` as JSON (free with
/// [`mt_string_free`]). `residual` and `violation` may be null; the latter
/// is set when the residual lies below minus the applicable tolerance.
///
/// # Safety
/// `state` must be a live handle, `config` null or live; `out_json` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn mt_sm_check(
    state: *const MtState,
    focus: usize,
    config: *const MtRoofConfig,
    out_json: *mut *mut c_char,
    residual: *mut f64,
    violation: *mut bool,
) -> MtStatus {
    guard(|| {
        if out_json.is_null() {
            return Err(null("out_json"));
        }
        let report = sm_residual(&deref(state, "state")?.0, focus, &config_or_default(config))?;
        let json = into_c_string(serde_json::to_string(&report)?)?;
        if !residual.is_null() {
            residual.write(report.sm_residual);
        }
        if !violation.is_null() {
            violation.write(report.sm_violation_candidate);
        }
        out_json.write(json);
        Ok(())
    })
}
