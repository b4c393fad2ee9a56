//! C ABI for the urn scheme simulator.
//!
//! Conventions:
//! - A scheme is an opaque handle created from the same JSON config the CLI
//!   accepts and released with [`urnsim_scheme_free`].
//! - Every fallible call returns a [`UrnsimStatus`]; on failure a
//!   thread-local message is available via [`urnsim_last_error`].
//! - Strings returned through out-parameters are NUL-terminated, owned by
//!   the caller and must be released with [`urnsim_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use urnsim::asymptotics::classify;
use urnsim::config::parse_config;
use urnsim::montecarlo::run_batch;
use urnsim::survival;
use urnsim::urn::{simulate_trajectory, UrnScheme};

/// Result codes of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UrnsimStatus {
    UrnsimOk = 0,
    /// The JSON config was malformed or violated a model constraint.
    UrnsimInvalidConfig = 1,
    /// An argument was out of range for the requested operation.
    UrnsimInvalidArgument = 2,
    /// A required pointer was NULL.
    UrnsimNullPointer = 3,
    /// The implementation panicked; this is a bug.
    UrnsimInternalError = 4,
}

/// Opaque scheme handle.
pub struct UrnsimScheme {
    inner: UrnScheme,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(message: &str) {
    let sanitized = message.replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).expect("NUL stripped");
    });
}

fn fail(status: UrnsimStatus, message: &str) -> UrnsimStatus {
    set_last_error(message);
    status
}

fn guarded(body: impl FnOnce() -> UrnsimStatus) -> UrnsimStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(_) => fail(UrnsimStatus::UrnsimInternalError, "internal panic"),
    }
}

fn write_string(out: *mut *mut c_char, value: String) -> UrnsimStatus {
    let sanitized = value.replace('\0', " ");
    let cstring = CString::new(sanitized).expect("NUL stripped");
    unsafe { *out = cstring.into_raw() };
    UrnsimStatus::UrnsimOk
}

/// Message describing the most recent failure on this thread. The pointer is
/// valid until the next failing call on the same thread; do not free it.
#[no_mangle]
pub extern "C" fn urnsim_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Builds a scheme from a JSON config document.
///
/// # Safety
/// `json` must be a NUL-terminated UTF-8 string; `out` must be a valid
/// pointer to receive the handle.
#[no_mangle]
pub unsafe extern "C" fn urnsim_scheme_from_json(
    json: *const c_char,
    out: *mut *mut UrnsimScheme,
) -> UrnsimStatus {
    guarded(|| {
        if json.is_null() || out.is_null() {
            return fail(UrnsimStatus::UrnsimNullPointer, "json/out is NULL");
        }
        let text = match unsafe { CStr::from_ptr(json) }.to_str() {
            Ok(t) => t,
            Err(_) => return fail(UrnsimStatus::UrnsimInvalidConfig, "config is not UTF-8"),
        };
        let scheme = match parse_config(text).and_then(|cfg| cfg.build()) {
            Ok(s) => s,
            Err(e) => return fail(UrnsimStatus::UrnsimInvalidConfig, &e.to_string()),
        };
        let handle = Box::new(UrnsimScheme { inner: scheme });
        unsafe { *out = Box::into_raw(handle) };
        UrnsimStatus::UrnsimOk
    })
}

/// Releases a scheme handle. NULL is ignored.
///
/// # Safety
/// `scheme` must have come from [`urnsim_scheme_from_json`] and must not be
/// used afterwards.
#[no_mangle]
pub unsafe extern "C" fn urnsim_scheme_free(scheme: *mut UrnsimScheme) {
    if !scheme.is_null() {
        drop(unsafe { Box::from_raw(scheme) });
    }
}

/// Writes the regime report as a JSON string.
///
/// # Safety
/// `scheme` must be a live handle; `out_json` must be valid.
#[no_mangle]
pub unsafe extern "C" fn urnsim_analyze_json(
    scheme: *const UrnsimScheme,
    out_json: *mut *mut c_char,
) -> UrnsimStatus {
    guarded(|| {
        if scheme.is_null() || out_json.is_null() {
            return fail(UrnsimStatus::UrnsimNullPointer, "scheme/out_json is NULL");
        }
        let scheme = unsafe { &*scheme };
        write_string(out_json, classify(&scheme.inner).to_json())
    })
}

/// Simulates one trajectory and writes its CSV (header `n,p,color`).
///
/// # Safety
/// `scheme` must be a live handle; `out_csv` must be valid.
#[no_mangle]
pub unsafe extern "C" fn urnsim_simulate_csv(
    scheme: *const UrnsimScheme,
    max_steps: u64,
    seed: u64,
    out_csv: *mut *mut c_char,
) -> UrnsimStatus {
    guarded(|| {
        if scheme.is_null() || out_csv.is_null() {
            return fail(UrnsimStatus::UrnsimNullPointer, "scheme/out_csv is NULL");
        }
        if max_steps < 1 {
            return fail(UrnsimStatus::UrnsimInvalidArgument, "max_steps must be >= 1");
        }
        let scheme = unsafe { &*scheme };
        let trajectory = simulate_trajectory(&scheme.inner, max_steps, seed);
        write_string(out_csv, trajectory.to_csv_string())
    })
}

/// Survival probability `P{tau > horizon}` for one initial composition.
///
/// # Safety
/// `scheme` must be a live handle; `out_q0` must be valid.
#[no_mangle]
pub unsafe extern "C" fn urnsim_survival_q0(
    scheme: *const UrnsimScheme,
    horizon: u64,
    t0: i64,
    alpha0: i64,
    out_q0: *mut f64,
) -> UrnsimStatus {
    guarded(|| {
        if scheme.is_null() || out_q0.is_null() {
            return fail(UrnsimStatus::UrnsimNullPointer, "scheme/out_q0 is NULL");
        }
        let scheme = unsafe { &*scheme };
        if t0 < 1 || alpha0 < 0 || alpha0 > t0 {
            return fail(
                UrnsimStatus::UrnsimInvalidArgument,
                "need t0 >= 1 and 0 <= alpha0 <= t0",
            );
        }
        match survival::solve(&scheme.inner, horizon, (t0, t0)) {
            Ok(grid) => {
                unsafe { *out_q0 = grid.q0(t0, alpha0).expect("cell inside grid") };
                UrnsimStatus::UrnsimOk
            }
            Err(e) => fail(UrnsimStatus::UrnsimInvalidArgument, &e.to_string()),
        }
    })
}

/// Runs a trajectory batch and writes the statistics as a JSON string.
///
/// # Safety
/// `scheme` must be a live handle; `out_json` must be valid.
#[no_mangle]
pub unsafe extern "C" fn urnsim_batch_json(
    scheme: *const UrnsimScheme,
    n_trajectories: u64,
    max_steps: u64,
    seed: u64,
    out_json: *mut *mut c_char,
) -> UrnsimStatus {
    guarded(|| {
        if scheme.is_null() || out_json.is_null() {
            return fail(UrnsimStatus::UrnsimNullPointer, "scheme/out_json is NULL");
        }
        if n_trajectories < 1 || max_steps < 1 {
            return fail(
                UrnsimStatus::UrnsimInvalidArgument,
                "n_trajectories and max_steps must be >= 1",
            );
        }
        let scheme = unsafe { &*scheme };
        let stats = run_batch(&scheme.inner, n_trajectories, max_steps, seed);
        write_string(out_json, stats.to_json())
    })
}

/// Releases a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must have been returned by this library and must not be used
/// afterwards.
#[no_mangle]
pub unsafe extern "C" fn urnsim_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}
