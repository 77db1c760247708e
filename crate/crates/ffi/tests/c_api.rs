use std::ffi::{CStr, CString};
use std::ptr;

use solenoid_gap_ffi::*;

fn problem(json: &str) -> *mut SgProblem {
    let text = CString::new(json).unwrap();
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { sg_problem_from_json(text.as_ptr(), &mut p) }, SgStatus::Ok);
    assert!(!p.is_null());
    p
}

const SL2: &str = r#"{"a":1,"d":2,"generators":[{"matrix":[["0","-1"],["1","0"]]},{"matrix":[["1","1"],["0","1"]]}]}"#;

#[test]
fn decide_and_certify_round_trip() {
    let p = problem(SL2);
    let mut v = ptr::null_mut();
    assert_eq!(unsafe { sg_decide(p, SgQuestion::Gap, 0, &mut v) }, SgStatus::Ok);
    let tag = unsafe { CStr::from_ptr(sg_verdict_tag(v)) };
    assert_eq!(tag.to_str().unwrap(), "Gap");
    let mut outcome = SgOutcome::Undecided;
    assert_eq!(unsafe { sg_verdict_outcome(v, &mut outcome) }, SgStatus::Ok);
    assert_eq!(outcome, SgOutcome::Positive);

    let mut cert = ptr::null_mut();
    assert_eq!(unsafe { sg_verdict_certificate_json(v, &mut cert) }, SgStatus::Ok);
    let mut ok = false;
    assert_eq!(unsafe { sg_verify_certificate(cert, &mut ok) }, SgStatus::Ok);
    assert!(ok);

    let tampered = CString::new(unsafe { CStr::from_ptr(cert) }.to_str().unwrap().replace("\"Gap\"", "\"NoGap\"")).unwrap();
    assert_eq!(unsafe { sg_verify_certificate(tampered.as_ptr(), &mut ok) }, SgStatus::Ok);
    assert!(!ok);

    unsafe {
        sg_string_free(cert);
        sg_verdict_free(v);
        sg_problem_free(p);
    }
}

#[test]
fn errors_are_reported() {
    let bad = CString::new(r#"{"a":4,"d":1,"generators":[]}"#).unwrap();
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { sg_problem_from_json(bad.as_ptr(), &mut p) }, SgStatus::InvalidInput);
    assert!(p.is_null());
    let msg = unsafe { CStr::from_ptr(sg_last_error_message()) }.to_str().unwrap().to_string();
    assert!(msg.contains("square-free"), "{msg}");

    assert_eq!(unsafe { sg_problem_from_json(ptr::null(), &mut p) }, SgStatus::NullPointer);
    let mut v = ptr::null_mut();
    assert_eq!(unsafe { sg_decide(ptr::null(), SgQuestion::Ergodic, 0, &mut v) }, SgStatus::NullPointer);
    assert!(unsafe { sg_verdict_tag(ptr::null()) }.is_null());
    unsafe {
        sg_problem_free(ptr::null_mut());
        sg_verdict_free(ptr::null_mut());
        sg_string_free(ptr::null_mut());
    }
}

#[test]
fn ergodicity_and_estimate() {
    let p = problem(r#"{"a":1,"d":1,"generators":[{"matrix":[["-1"]]}]}"#);
    let mut v = ptr::null_mut();
    assert_eq!(unsafe { sg_decide(p, SgQuestion::Ergodic, 0, &mut v) }, SgStatus::Ok);
    let mut outcome = SgOutcome::Positive;
    unsafe { sg_verdict_outcome(v, &mut outcome) };
    assert_eq!(outcome, SgOutcome::Negative);
    let mut lambda = 0.0;
    assert_eq!(unsafe { sg_estimate_top(p, 2, 0, 100, 1e-10, &mut lambda) }, SgStatus::Ok);
    assert!((lambda - 1.0).abs() < 1e-9);
    assert_eq!(unsafe { sg_estimate_top(p, 0, 0, 100, 1e-10, &mut lambda) }, SgStatus::SimulationFailed);
    unsafe {
        sg_verdict_free(v);
        sg_problem_free(p);
    }
}

#[test]
fn header_declares_the_api() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/solenoid_gap.h")).unwrap();
    for name in [
        "sg_problem_from_json",
        "sg_decide",
        "sg_verdict_certificate_json",
        "sg_verify_certificate",
        "sg_last_error_message",
        "typedef struct SgProblem SgProblem",
        "SG_STATUS_OK",
    ] {
        assert!(header.contains(name), "missing {name}");
    }
}
