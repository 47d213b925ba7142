//! C ABI over `srs-lab`.
//!
//! Every object crosses the boundary as an opaque handle created by an
//! `srs_*_new`/producer function and released by the matching `srs_*_free`.
//! Functions return an [`SrsError`] code and write results through out
//! pointers; nothing panics across the boundary.

use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use srs_lab::certified::{decide_point_report, CertError};
use srs_lab::dynamics::{iterate_orbit, verify_cycle_entries, OrbitOptions};
use srs_lab::param::Rational;
use srs_lab::spectral::cycle_bound;
use srs_lab::{classify, LatticePoint, OrbitOutcome, OrbitRecord, ParamVector, SrsError as CoreError, Status, Verdict};

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SrsError {
    SrsOk = 0,
    SrsNullPointer = 1,
    SrsInvalidArgument = 2,
    SrsNotExpanding = 3,
    SrsMarginTooSmall = 4,
    SrsWitnessExplosion = 5,
    SrsOverflow = 6,
    SrsBufferTooSmall = 7,
    SrsNoBound = 8,
    SrsInternal = 9,
}

/// Verdict statuses, in the order of the library's `Status`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SrsStatus {
    SrsInDStar = 0,
    SrsNotInDStar = 1,
    SrsContractive = 2,
    SrsUnknownBounded = 3,
    SrsBoundaryUndecidable = 4,
}

/// How an orbit ended.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SrsOrbitOutcome {
    SrsReachedZero = 0,
    SrsReachedCycle = 1,
    SrsEscaped = 2,
    SrsOrbitUndecided = 3,
}

/// Opaque parameter vector.
pub struct SrsParam(ParamVector);

/// Opaque verdict.
pub struct SrsVerdict(Verdict);

/// Opaque orbit record.
pub struct SrsOrbit(OrbitRecord);

fn guard(f: impl FnOnce() -> Result<(), SrsError>) -> SrsError {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SrsError::SrsOk,
        Ok(Err(e)) => e,
        Err(_) => SrsError::SrsInternal,
    }
}

fn core_code(e: CoreError) -> SrsError {
    match e {
        CoreError::Overflow => SrsError::SrsOverflow,
        _ => SrsError::SrsInvalidArgument,
    }
}

fn cert_code(e: CertError) -> SrsError {
    match e {
        CertError::NotExpanding => SrsError::SrsNotExpanding,
        CertError::MarginTooSmall { .. } => SrsError::SrsMarginTooSmall,
        CertError::WitnessExplosion { .. } => SrsError::SrsWitnessExplosion,
        CertError::Srs(e) => core_code(e),
        _ => SrsError::SrsInternal,
    }
}

fn boxed<T>(out: *mut *mut T, value: T) {
    // SAFETY: callers check `out` for null first.
    unsafe { *out = Box::into_raw(Box::new(value)) };
}

unsafe fn param_ref<'a>(p: *const SrsParam) -> Result<&'a ParamVector, SrsError> {
    p.as_ref().map(|p| &p.0).ok_or(SrsError::SrsNullPointer)
}

/// Static description of an error code; unknown codes give
/// `"unknown error"`.
#[no_mangle]
pub extern "C" fn srs_error_message(code: i32) -> *const c_char {
    let s: &'static CStr = match code {
        0 => c"ok",
        1 => c"null pointer",
        2 => c"invalid argument",
        3 => c"parameter is not expanding",
        4 => c"expansion margin too small",
        5 => c"witness set too large",
        6 => c"integer overflow",
        7 => c"buffer too small",
        8 => c"no finite bound",
        9 => c"internal error",
        _ => c"unknown error",
    };
    s.as_ptr()
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn srs_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Exact parameter `(n0/d0, n1/d1)`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn srs_param_new_rational(
    n0: i64,
    d0: i64,
    n1: i64,
    d1: i64,
    out: *mut *mut SrsParam,
) -> SrsError {
    guard(|| {
        if out.is_null() {
            return Err(SrsError::SrsNullPointer);
        }
        if d0 == 0 || d1 == 0 {
            return Err(SrsError::SrsInvalidArgument);
        }
        let r = ParamVector::from_rationals(&[Rational::new(n0, d0), Rational::new(n1, d1)])
            .map_err(core_code)?;
        boxed(out, SrsParam(r));
        Ok(())
    })
}

/// Parameter from two strings, each an integer, `p/q` or decimal.
///
/// # Safety
/// `r0` and `r1` must be NUL-terminated; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn srs_param_parse(
    r0: *const c_char,
    r1: *const c_char,
    out: *mut *mut SrsParam,
) -> SrsError {
    guard(|| {
        if r0.is_null() || r1.is_null() || out.is_null() {
            return Err(SrsError::SrsNullPointer);
        }
        let a = CStr::from_ptr(r0).to_str().map_err(|_| SrsError::SrsInvalidArgument)?;
        let b = CStr::from_ptr(r1).to_str().map_err(|_| SrsError::SrsInvalidArgument)?;
        let r = ParamVector::parse(&[a, b]).map_err(core_code)?;
        boxed(out, SrsParam(r));
        Ok(())
    })
}

/// # Safety
/// `p` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn srs_param_free(p: *mut SrsParam) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Closed-form classification.
///
/// # Safety
/// `p` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn srs_classify(p: *const SrsParam, out: *mut *mut SrsVerdict) -> SrsError {
    guard(|| {
        let r = param_ref(p)?;
        if out.is_null() {
            return Err(SrsError::SrsNullPointer);
        }
        let v = classify(r).map_err(core_code)?;
        boxed(out, SrsVerdict(v));
        Ok(())
    })
}

/// Certified decision. `rho <= 0` selects the default.
///
/// # Safety
/// `p` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn srs_decide_point(
    p: *const SrsParam,
    rho: f64,
    out: *mut *mut SrsVerdict,
) -> SrsError {
    guard(|| {
        let r = param_ref(p)?;
        if out.is_null() {
            return Err(SrsError::SrsNullPointer);
        }
        let rho = (rho > 0.0).then_some(rho);
        let d = decide_point_report(r, rho).map_err(cert_code)?;
        boxed(out, SrsVerdict(d.verdict));
        Ok(())
    })
}

/// # Safety
/// `v` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn srs_verdict_status(v: *const SrsVerdict, out: *mut SrsStatus) -> SrsError {
    guard(|| {
        let v = v.as_ref().ok_or(SrsError::SrsNullPointer)?;
        let out = out.as_mut().ok_or(SrsError::SrsNullPointer)?;
        *out = match v.0.status() {
            Status::InDStar => SrsStatus::SrsInDStar,
            Status::NotInDStar => SrsStatus::SrsNotInDStar,
            Status::Contractive => SrsStatus::SrsContractive,
            Status::UnknownBounded => SrsStatus::SrsUnknownBounded,
            Status::BoundaryUndecidable => SrsStatus::SrsBoundaryUndecidable,
        };
        Ok(())
    })
}

/// Rule tag such as `Lemma4.1`, or null when the verdict has none. The
/// string is static.
///
/// # Safety
/// `v` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn srs_verdict_rule(v: *const SrsVerdict) -> *const c_char {
    let Some(v) = v.as_ref() else {
        return ptr::null();
    };
    match v.0.rule() {
        Some(rule) => rule_cstr(rule.tag()).map_or(ptr::null(), CStr::as_ptr),
        None => ptr::null(),
    }
}

fn rule_cstr(tag: &str) -> Option<&'static CStr> {
    const TAGS: &[&CStr] = &[
        c"Lemma4.1",
        c"Lemma4.2",
        c"Lemma4.3",
        c"Thm4.4i",
        c"Thm4.4ii",
        c"Thm4.4iii",
        c"Thm4.5",
        c"Thm4.7",
        c"Thm4.8",
        c"Thm4.9",
        c"Certified",
    ];
    TAGS.iter().copied().find(|c| c.to_bytes() == tag.as_bytes())
}

/// Copies the cycle of a `NotInDStar` verdict into `buf`. `len` receives
/// the period (0 when there is no cycle) even when `buf` is too small.
///
/// # Safety
/// `v` must be a live handle; `buf` must hold `cap` elements or be null with
/// `cap == 0`; `len` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn srs_verdict_cycle(
    v: *const SrsVerdict,
    buf: *mut i64,
    cap: usize,
    len: *mut usize,
) -> SrsError {
    guard(|| {
        let v = v.as_ref().ok_or(SrsError::SrsNullPointer)?;
        let len = len.as_mut().ok_or(SrsError::SrsNullPointer)?;
        let entries = v.0.cycle().map(|c| c.entries()).unwrap_or(&[]);
        copy_out(entries, buf, cap, len)
    })
}

unsafe fn copy_out(src: &[i64], buf: *mut i64, cap: usize, len: &mut usize) -> Result<(), SrsError> {
    *len = src.len();
    if src.len() > cap {
        return Err(SrsError::SrsBufferTooSmall);
    }
    if !src.is_empty() {
        if buf.is_null() {
            return Err(SrsError::SrsNullPointer);
        }
        ptr::copy_nonoverlapping(src.as_ptr(), buf, src.len());
    }
    Ok(())
}

/// # Safety
/// `v` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn srs_verdict_free(v: *mut SrsVerdict) {
    if !v.is_null() {
        drop(Box::from_raw(v));
    }
}

/// Iterates from `(a0, a1)` for at most `budget` steps.
///
/// # Safety
/// `p` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn srs_orbit(
    p: *const SrsParam,
    a0: i64,
    a1: i64,
    budget: usize,
    out: *mut *mut SrsOrbit,
) -> SrsError {
    guard(|| {
        let r = param_ref(p)?;
        if out.is_null() {
            return Err(SrsError::SrsNullPointer);
        }
        let cert = if r.is_exact() {
            srs_lab::certified::build_norm(r, None).ok()
        } else {
            None
        };
        let opts = OrbitOptions {
            budget,
            certificate: cert.as_ref().map(|c| c as _),
            heuristic_radius: if cert.is_some() {
                None
            } else {
                OrbitOptions::default().heuristic_radius
            },
        };
        let rec = iterate_orbit(r, &LatticePoint::new(vec![a0, a1]), &opts).map_err(core_code)?;
        boxed(out, SrsOrbit(rec));
        Ok(())
    })
}

/// # Safety
/// `o` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn srs_orbit_outcome(o: *const SrsOrbit, out: *mut SrsOrbitOutcome) -> SrsError {
    guard(|| {
        let o = o.as_ref().ok_or(SrsError::SrsNullPointer)?;
        let out = out.as_mut().ok_or(SrsError::SrsNullPointer)?;
        *out = match o.0.outcome {
            OrbitOutcome::ReachedZero => SrsOrbitOutcome::SrsReachedZero,
            OrbitOutcome::ReachedCycle(_) => SrsOrbitOutcome::SrsReachedCycle,
            OrbitOutcome::Escaped { .. } => SrsOrbitOutcome::SrsEscaped,
            OrbitOutcome::Undecided { .. } => SrsOrbitOutcome::SrsOrbitUndecided,
        };
        Ok(())
    })
}

/// Copies the compressed orbit `a_0, a_1, ...`; same buffer protocol as
/// [`srs_verdict_cycle`].
///
/// # Safety
/// As for [`srs_verdict_cycle`].
#[no_mangle]
pub unsafe extern "C" fn srs_orbit_scalars(
    o: *const SrsOrbit,
    buf: *mut i64,
    cap: usize,
    len: *mut usize,
) -> SrsError {
    guard(|| {
        let o = o.as_ref().ok_or(SrsError::SrsNullPointer)?;
        let len = len.as_mut().ok_or(SrsError::SrsNullPointer)?;
        copy_out(&o.0.scalars(), buf, cap, len)
    })
}

/// Copies the cycle the orbit fell into, if any.
///
/// # Safety
/// As for [`srs_verdict_cycle`].
#[no_mangle]
pub unsafe extern "C" fn srs_orbit_cycle(
    o: *const SrsOrbit,
    buf: *mut i64,
    cap: usize,
    len: *mut usize,
) -> SrsError {
    guard(|| {
        let o = o.as_ref().ok_or(SrsError::SrsNullPointer)?;
        let len = len.as_mut().ok_or(SrsError::SrsNullPointer)?;
        let entries = match &o.0.outcome {
            OrbitOutcome::ReachedCycle(c) => c.entries(),
            _ => &[],
        };
        copy_out(entries, buf, cap, len)
    })
}

/// # Safety
/// `o` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn srs_orbit_free(o: *mut SrsOrbit) {
    if !o.is_null() {
        drop(Box::from_raw(o));
    }
}

/// Exact check that `entries[0..len]` is a cycle of the map.
///
/// # Safety
/// `p` must be a live handle; `entries` must hold `len` elements.
#[no_mangle]
pub unsafe extern "C" fn srs_verify_cycle(
    p: *const SrsParam,
    entries: *const i64,
    len: usize,
    out: *mut bool,
) -> SrsError {
    guard(|| {
        let r = param_ref(p)?;
        let out = out.as_mut().ok_or(SrsError::SrsNullPointer)?;
        if entries.is_null() || len == 0 {
            return Err(SrsError::SrsInvalidArgument);
        }
        *out = verify_cycle_entries(r, std::slice::from_raw_parts(entries, len));
        Ok(())
    })
}

/// Upper bound on the absolute value of every cycle element.
///
/// # Safety
/// `p` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn srs_cycle_bound(p: *const SrsParam, out: *mut f64) -> SrsError {
    guard(|| {
        let r = param_ref(p)?;
        let out = out.as_mut().ok_or(SrsError::SrsNullPointer)?;
        *out = cycle_bound(r).map_err(core_code)?.map_err(|_| SrsError::SrsNoBound)?;
        Ok(())
    })
}
