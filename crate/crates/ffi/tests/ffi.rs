use std::ffi::{CStr, CString};
use std::ptr;

use srs_lab_ffi::*;

fn param(n0: i64, d0: i64, n1: i64, d1: i64) -> *mut SrsParam {
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { srs_param_new_rational(n0, d0, n1, d1, &mut p) }, SrsError::SrsOk);
    p
}

fn status(v: *const SrsVerdict) -> SrsStatus {
    let mut s = SrsStatus::SrsBoundaryUndecidable;
    assert_eq!(unsafe { srs_verdict_status(v, &mut s) }, SrsError::SrsOk);
    s
}

fn cycle(v: *const SrsVerdict) -> Vec<i64> {
    let mut len = 0usize;
    let mut buf = [0i64; 8];
    assert_eq!(
        unsafe { srs_verdict_cycle(v, buf.as_mut_ptr(), buf.len(), &mut len) },
        SrsError::SrsOk
    );
    buf[..len].to_vec()
}

#[test]
fn classify_examples() {
    let p = param(6, 5, -3, 2);
    let mut v = ptr::null_mut();
    assert_eq!(unsafe { srs_classify(p, &mut v) }, SrsError::SrsOk);
    assert_eq!(status(v), SrsStatus::SrsNotInDStar);
    assert_eq!(cycle(v), vec![1]);
    let rule = unsafe { CStr::from_ptr(srs_verdict_rule(v)) };
    assert_eq!(rule.to_str().unwrap(), "Lemma4.1");
    unsafe {
        srs_verdict_free(v);
        srs_param_free(p);
    }

    let (a, b) = (CString::new("1.2").unwrap(), CString::new("0.1").unwrap());
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { srs_param_parse(a.as_ptr(), b.as_ptr(), &mut p) }, SrsError::SrsOk);
    let mut v = ptr::null_mut();
    assert_eq!(unsafe { srs_classify(p, &mut v) }, SrsError::SrsOk);
    assert_eq!(status(v), SrsStatus::SrsUnknownBounded);
    assert!(unsafe { srs_verdict_rule(v) }.is_null());
    assert!(cycle(v).is_empty());
    unsafe {
        srs_verdict_free(v);
        srs_param_free(p);
    }
}

#[test]
fn decide_and_errors() {
    let p = param(3, 2, 0, 1);
    let mut v = ptr::null_mut();
    assert_eq!(unsafe { srs_decide_point(p, 0.0, &mut v) }, SrsError::SrsOk);
    assert_eq!(status(v), SrsStatus::SrsInDStar);
    unsafe {
        srs_verdict_free(v);
        srs_param_free(p);
    }

    let p = param(1, 1, 0, 1);
    let mut v = ptr::null_mut();
    assert_eq!(unsafe { srs_decide_point(p, 0.0, &mut v) }, SrsError::SrsNotExpanding);
    assert!(v.is_null());
    unsafe { srs_param_free(p) };

    let mut p = ptr::null_mut();
    assert_eq!(
        unsafe { srs_param_new_rational(1, 0, 1, 1, &mut p) },
        SrsError::SrsInvalidArgument
    );
    assert_eq!(unsafe { srs_classify(ptr::null(), &mut v) }, SrsError::SrsNullPointer);
    let bad = CString::new("x").unwrap();
    assert_eq!(
        unsafe { srs_param_parse(bad.as_ptr(), bad.as_ptr(), &mut p) },
        SrsError::SrsInvalidArgument
    );
    let msg = unsafe { CStr::from_ptr(srs_error_message(SrsError::SrsNotExpanding as i32)) };
    assert_eq!(msg.to_str().unwrap(), "parameter is not expanding");
    let msg = unsafe { CStr::from_ptr(srs_error_message(-7)) };
    assert_eq!(msg.to_str().unwrap(), "unknown error");
    unsafe {
        srs_param_free(ptr::null_mut());
        srs_verdict_free(ptr::null_mut());
        srs_orbit_free(ptr::null_mut());
    }
}

#[test]
fn orbit_and_buffers() {
    let p = param(1, 1, 0, 1);
    let mut o = ptr::null_mut();
    assert_eq!(unsafe { srs_orbit(p, 1, 0, 100, &mut o) }, SrsError::SrsOk);
    let mut out = SrsOrbitOutcome::SrsOrbitUndecided;
    assert_eq!(unsafe { srs_orbit_outcome(o, &mut out) }, SrsError::SrsOk);
    assert_eq!(out, SrsOrbitOutcome::SrsReachedCycle);

    let mut len = 0usize;
    let mut small = [0i64; 2];
    assert_eq!(
        unsafe { srs_orbit_cycle(o, small.as_mut_ptr(), small.len(), &mut len) },
        SrsError::SrsBufferTooSmall
    );
    assert_eq!(len, 4);
    let mut buf = [0i64; 4];
    assert_eq!(
        unsafe { srs_orbit_cycle(o, buf.as_mut_ptr(), buf.len(), &mut len) },
        SrsError::SrsOk
    );
    let mut ok = false;
    assert_eq!(unsafe { srs_verify_cycle(p, buf.as_ptr(), 4, &mut ok) }, SrsError::SrsOk);
    assert!(ok);

    let mut scalars = [0i64; 16];
    assert_eq!(
        unsafe { srs_orbit_scalars(o, scalars.as_mut_ptr(), scalars.len(), &mut len) },
        SrsError::SrsOk
    );
    assert_eq!(&scalars[..4], &[1, 0, -1, 0]);
    unsafe {
        srs_orbit_free(o);
        srs_param_free(p);
    }

    let p = param(6, 1, -5, 1);
    let mut o = ptr::null_mut();
    assert_eq!(unsafe { srs_orbit(p, 2, 5, 100, &mut o) }, SrsError::SrsOk);
    assert_eq!(unsafe { srs_orbit_outcome(o, &mut out) }, SrsError::SrsOk);
    assert_eq!(out, SrsOrbitOutcome::SrsEscaped);
    let mut bound = 0.0;
    assert_eq!(unsafe { srs_cycle_bound(p, &mut bound) }, SrsError::SrsOk);
    assert!(bound.is_finite() && bound > 0.0);
    unsafe {
        srs_orbit_free(o);
        srs_param_free(p);
    }
}

#[test]
fn header_declares_the_api() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/srs_lab.h")).unwrap();
    for name in [
        "typedef struct SrsParam SrsParam;",
        "SRS_NOT_EXPANDING = 3",
        "srs_param_new_rational",
        "srs_param_parse",
        "srs_classify",
        "srs_decide_point",
        "srs_verdict_cycle",
        "srs_orbit_scalars",
        "srs_verify_cycle",
        "srs_cycle_bound",
        "srs_param_free",
    ] {
        assert!(header.contains(name), "{name} missing from header");
    }
    let v = unsafe { CStr::from_ptr(srs_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}
