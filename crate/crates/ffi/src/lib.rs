//! C ABI over `hkcce`.
//!
//! Every function returns an `HkcceStatus`; results go through out-pointers.
//! On failure the message is available from `hkcce_last_error_message` on
//! the same thread until the next call.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use hkcce::compactification::Kind;
use hkcce::hk_verifier::{self, Verdict, VerificationReport, VerifyConfig};
use hkcce::scattering::{self, Scattering, SolverConfig};
use hkcce::special_fn::{self, QCurvParams};
use hkcce::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HkcceStatus {
    Ok = 0,
    NullPointer = 1,
    Domain = 2,
    Numerical = 3,
    Consistency = 4,
    Config = 5,
    Internal = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HkcceVerdict {
    Equality = 0,
    Strict = 1,
    Inconclusive = 2,
    Fail = 3,
}

/// Flat copy of a verification report. Remainders are 0 when absent.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct HkcceReport {
    pub lhs: f64,
    pub rhs: f64,
    pub gap: f64,
    pub err_est: f64,
    pub remainder_1: f64,
    pub remainder_2: f64,
    pub verdict: HkcceVerdict,
}

/// Opaque solved scattering problem.
pub struct HkcceScattering {
    inner: Scattering,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> HkcceStatus {
    match e {
        Error::Domain(_) | Error::Resonance { .. } => HkcceStatus::Domain,
        Error::IntegrationFailure { .. }
        | Error::MatchingFailure { .. }
        | Error::NonPositive { .. }
        | Error::Series(_) => HkcceStatus::Numerical,
        Error::Consistency(_) | Error::UnsupportedIntegral(_) => HkcceStatus::Consistency,
        Error::Config(_) => HkcceStatus::Config,
        Error::Io(_) | Error::Json(_) => HkcceStatus::Internal,
    }
}

/// Run `f`, translating errors and panics into a status.
fn guard(f: impl FnOnce() -> Result<(), (HkcceStatus, String)>) -> HkcceStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => HkcceStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("panic inside hkcce".into());
            HkcceStatus::Internal
        }
    }
}

fn lift<T>(r: hkcce::Result<T>) -> Result<T, (HkcceStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null_err(name: &str) -> (HkcceStatus, String) {
    (HkcceStatus::NullPointer, format!("{name} is null"))
}

/// # Safety
/// `out` must be null or valid for a write of `T`.
unsafe fn write_out<T>(out: *mut T, name: &str, v: T) -> Result<(), (HkcceStatus, String)> {
    if out.is_null() {
        return Err(null_err(name));
    }
    out.write(v);
    Ok(())
}

/// Message of the last failure on this thread, or null. Valid until the
/// next call into the library on the same thread.
#[no_mangle]
pub extern "C" fn hkcce_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Static version string.
#[no_mangle]
pub extern "C" fn hkcce_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `out` must be valid for writing one `double`.
#[no_mangle]
pub unsafe extern "C" fn hkcce_gamma(x: f64, out: *mut f64) -> HkcceStatus {
    guard(|| write_out(out, "out", lift(special_fn::gamma_fn(x))?))
}

/// # Safety
/// `out` must be valid for writing one `double`.
#[no_mangle]
pub unsafe extern "C" fn hkcce_d_gamma(gamma: f64, out: *mut f64) -> HkcceStatus {
    guard(|| write_out(out, "out", lift(special_fn::d_gamma(gamma))?))
}

/// # Safety
/// `out` must be valid for writing one `double`.
#[no_mangle]
pub unsafe extern "C" fn hkcce_hk_constant(n: u32, gamma: f64, out: *mut f64) -> HkcceStatus {
    guard(|| write_out(out, "out", lift(special_fn::hk_constant(n, gamma))?))
}

/// Closed-form Q-curvature of the round boundary.
///
/// # Safety
/// `out` must be valid for writing one `double`.
#[no_mangle]
pub unsafe extern "C" fn hkcce_sphere_q_oracle(n: u32, gamma: f64, k: f64, out: *mut f64) -> HkcceStatus {
    guard(|| {
        let p = lift(QCurvParams::new(n, gamma, k))?;
        write_out(out, "out", special_fn::sphere_q_oracle(&p))
    })
}

/// Solve the scattering problem. `ode_tol <= 0` or `t_max <= 0` select the
/// defaults. Free the handle with `hkcce_scattering_free`.
///
/// # Safety
/// `out` must be valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn hkcce_scattering_solve(
    n: u32,
    gamma: f64,
    k: f64,
    ode_tol: f64,
    t_max: f64,
    out: *mut *mut HkcceScattering,
) -> HkcceStatus {
    guard(|| {
        if out.is_null() {
            return Err(null_err("out"));
        }
        let mut cfg = SolverConfig::default();
        if ode_tol > 0.0 {
            cfg.ode_tol = ode_tol;
        }
        if t_max > 0.0 {
            cfg.t_max = t_max;
        }
        lift(cfg.validate())?;
        let p = lift(QCurvParams::new(n, gamma, k))?;
        let inner = lift(scattering::scatter(&p, &cfg))?;
        out.write(Box::into_raw(Box::new(HkcceScattering { inner })));
        Ok(())
    })
}

/// # Safety
/// `h` must come from `hkcce_scattering_solve`; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hkcce_scattering_q(h: *const HkcceScattering, out: *mut f64) -> HkcceStatus {
    guard(|| {
        let h = h.as_ref().ok_or_else(|| null_err("handle"))?;
        write_out(out, "out", h.inner.result.q_value)
    })
}

/// The scattering value `S(s)1 = c2/c1`.
///
/// # Safety
/// `h` must come from `hkcce_scattering_solve`; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hkcce_scattering_value(h: *const HkcceScattering, out: *mut f64) -> HkcceStatus {
    guard(|| {
        let h = h.as_ref().ok_or_else(|| null_err("handle"))?;
        write_out(out, "out", h.inner.result.scattering_value)
    })
}

/// Accepts null.
///
/// # Safety
/// `h` must be null or come from `hkcce_scattering_solve`, and not be used again.
#[no_mangle]
pub unsafe extern "C" fn hkcce_scattering_free(h: *mut HkcceScattering) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

fn flatten(r: &VerificationReport) -> HkcceReport {
    let rem = |i: usize| r.remainders.get(i).map_or(0.0, |x| x.value);
    HkcceReport {
        lhs: r.lhs,
        rhs: r.rhs,
        gap: r.gap,
        err_est: r.err_est,
        remainder_1: rem(0),
        remainder_2: rem(1),
        verdict: match r.verdict {
            Verdict::Equality => HkcceVerdict::Equality,
            Verdict::Strict => HkcceVerdict::Strict,
            Verdict::Inconclusive => HkcceVerdict::Inconclusive,
            Verdict::Fail => HkcceVerdict::Fail,
        },
    }
}

fn verify_cfg(tol: f64) -> VerifyConfig {
    let mut c = VerifyConfig::default();
    if tol > 0.0 {
        c.tol = tol;
    }
    c
}

unsafe fn verify_into(
    out: *mut HkcceReport,
    f: impl FnOnce() -> hkcce::Result<VerificationReport>,
) -> HkcceStatus {
    guard(|| {
        if out.is_null() {
            return Err(null_err("out"));
        }
        let r = lift(f())?;
        out.write(flatten(&r));
        Ok(())
    })
}

/// Adapted inequality. `tol <= 0` selects the default 1e-6.
///
/// # Safety
/// `out` must be valid for writing one `HkcceReport`.
#[no_mangle]
pub unsafe extern "C" fn hkcce_verify_adapted(
    n: u32,
    gamma: f64,
    k: f64,
    tol: f64,
    out: *mut HkcceReport,
) -> HkcceStatus {
    verify_into(out, || hk_verifier::verify_adapted(n, gamma, k, &verify_cfg(tol)))
}

/// # Safety
/// `out` must be valid for writing one `HkcceReport`.
#[no_mangle]
pub unsafe extern "C" fn hkcce_verify_cla(n: u32, k: f64, tol: f64, out: *mut HkcceReport) -> HkcceStatus {
    verify_into(out, || hk_verifier::verify_cla(n, k, &verify_cfg(tol)))
}

/// # Safety
/// `out` must be valid for writing one `HkcceReport`.
#[no_mangle]
pub unsafe extern "C" fn hkcce_verify_lee(n: u32, k: f64, tol: f64, out: *mut HkcceReport) -> HkcceStatus {
    verify_into(out, || hk_verifier::verify_lee(n, k, &verify_cfg(tol)))
}

/// Defect identity of the adapted compactification.
///
/// # Safety
/// `out` must be valid for writing one `HkcceReport`.
#[no_mangle]
pub unsafe extern "C" fn hkcce_defect_adapted(
    n: u32,
    gamma: f64,
    k: f64,
    tol: f64,
    out: *mut HkcceReport,
) -> HkcceStatus {
    verify_into(out, || {
        hk_verifier::defect_identity(Kind::Adapted { gamma }, n, k, &verify_cfg(tol))
    })
}

/// # Safety
/// `out` must be valid for writing one `HkcceReport`.
#[no_mangle]
pub unsafe extern "C" fn hkcce_defect_lee(n: u32, k: f64, tol: f64, out: *mut HkcceReport) -> HkcceStatus {
    verify_into(out, || {
        hk_verifier::defect_identity(Kind::Lee, n, k, &verify_cfg(tol))
    })
}

/// Exact certificate for the `r^4` boundary expansion as a JSON string.
/// Free it with `hkcce_string_free`.
///
/// # Safety
/// `out` must be valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn hkcce_prop21_json(n: u32, out: *mut *mut c_char) -> HkcceStatus {
    guard(|| {
        if out.is_null() {
            return Err(null_err("out"));
        }
        let cert = lift(hkcce::jet_algebra::verify_prop21(n))?;
        let text = cert.to_json().to_string();
        let c = CString::new(text).map_err(|e| (HkcceStatus::Internal, e.to_string()))?;
        out.write(c.into_raw());
        Ok(())
    })
}

/// Accepts null.
///
/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hkcce_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Borrow the last error as a Rust string; for tests and Rust callers.
pub fn last_error() -> Option<String> {
    let p = hkcce_last_error_message();
    // SAFETY: non-null pointers come from the thread-local CString.
    (!p.is_null()).then(|| unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned())
}
