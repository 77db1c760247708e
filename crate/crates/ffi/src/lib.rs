//! C interface to solenoid-gap.
//!
//! Problems and verdicts are opaque handles owned by the caller and released with the matching
//! `*_free` function. Every fallible call returns an [`SgStatus`]; on failure the message is
//! available from [`sg_last_error_message`] until the next failing call on the same thread.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use solenoid_gap::decide::{
    decide_ergodicity_with, decide_spectral_gap_with, decide_strong_ergodicity_with, emit_certificate, verify_certificate_json,
    DecideOptions, Verdict,
};
use solenoid_gap::koopman::{estimate_top, Truncation};
use solenoid_gap::solenoid::{parse_problem, AffineGen, SolenoidSpec};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SgStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidInput = 3,
    DecisionFailed = 4,
    SimulationFailed = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SgQuestion {
    Gap = 0,
    Ergodic = 1,
    Strong = 2,
}

/// `Positive` is Gap, Ergodic or StronglyErgodic; `Negative` their negations.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SgOutcome {
    Positive = 0,
    Negative = 1,
    Undecided = 2,
}

/// A validated problem: the solenoid and its affine generators.
pub struct SgProblem {
    spec: SolenoidSpec,
    gens: Vec<AffineGen>,
}

/// A verdict together with the problem it answers.
pub struct SgVerdict {
    spec: SolenoidSpec,
    gens: Vec<AffineGen>,
    verdict: Verdict,
    tag: CString,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn fail(status: SgStatus, msg: impl Into<String>) -> SgStatus {
    set_error(msg);
    status
}

fn guarded(f: impl FnOnce() -> SgStatus) -> SgStatus {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| fail(SgStatus::Panic, "internal panic"))
}

unsafe fn read_str<'a>(s: *const c_char) -> Result<&'a str, SgStatus> {
    if s.is_null() {
        return Err(fail(SgStatus::NullPointer, "null string argument"));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| fail(SgStatus::InvalidUtf8, "argument is not valid UTF-8"))
}

/// Message of the last failure on this thread; never null, empty if none.
#[no_mangle]
pub extern "C" fn sg_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

#[no_mangle]
pub extern "C" fn sg_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parses and validates a JSON problem description.
#[no_mangle]
pub unsafe extern "C" fn sg_problem_from_json(json: *const c_char, out: *mut *mut SgProblem) -> SgStatus {
    guarded(|| {
        if out.is_null() {
            return fail(SgStatus::NullPointer, "null output pointer");
        }
        *out = ptr::null_mut();
        let text = match read_str(json) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match parse_problem(text) {
            Ok((spec, gens)) => {
                *out = Box::into_raw(Box::new(SgProblem { spec, gens }));
                SgStatus::Ok
            }
            Err(e) => fail(SgStatus::InvalidInput, e.to_string()),
        }
    })
}

#[no_mangle]
pub unsafe extern "C" fn sg_problem_free(problem: *mut SgProblem) {
    if !problem.is_null() {
        drop(Box::from_raw(problem));
    }
}

/// Decides `question` for `problem`; the verdict must be released with [`sg_verdict_free`].
#[no_mangle]
pub unsafe extern "C" fn sg_decide(
    problem: *const SgProblem,
    question: SgQuestion,
    seed: u64,
    out: *mut *mut SgVerdict,
) -> SgStatus {
    guarded(|| {
        if problem.is_null() || out.is_null() {
            return fail(SgStatus::NullPointer, "null problem or output pointer");
        }
        *out = ptr::null_mut();
        let p = &*problem;
        let opts = DecideOptions {
            seed,
            ..DecideOptions::default()
        };
        let verdict = match question {
            SgQuestion::Gap => decide_spectral_gap_with(&p.spec, &p.gens, &opts).map(Verdict::Gap),
            SgQuestion::Ergodic => decide_ergodicity_with(&p.spec, &p.gens, &opts).map(Verdict::Ergodic),
            SgQuestion::Strong => decide_strong_ergodicity_with(&p.spec, &p.gens, &opts).map(Verdict::Strong),
        };
        match verdict {
            Ok(verdict) => {
                let tag = CString::new(verdict.tag()).expect("tags have no NUL");
                *out = Box::into_raw(Box::new(SgVerdict {
                    spec: p.spec.clone(),
                    gens: p.gens.clone(),
                    verdict,
                    tag,
                }));
                SgStatus::Ok
            }
            Err(e) => fail(SgStatus::DecisionFailed, e.to_string()),
        }
    })
}

#[no_mangle]
pub unsafe extern "C" fn sg_verdict_outcome(verdict: *const SgVerdict, out: *mut SgOutcome) -> SgStatus {
    guarded(|| {
        if verdict.is_null() || out.is_null() {
            return fail(SgStatus::NullPointer, "null verdict or output pointer");
        }
        *out = match (*verdict).verdict.tag() {
            "Gap" | "Ergodic" | "StronglyErgodic" => SgOutcome::Positive,
            "Undecided" => SgOutcome::Undecided,
            _ => SgOutcome::Negative,
        };
        SgStatus::Ok
    })
}

/// Verdict tag such as `"NoGap"`; valid while the verdict is alive, null for a null verdict.
#[no_mangle]
pub unsafe extern "C" fn sg_verdict_tag(verdict: *const SgVerdict) -> *const c_char {
    if verdict.is_null() {
        return ptr::null();
    }
    (*verdict).tag.as_ptr()
}

/// Certificate JSON for the verdict; release with [`sg_string_free`].
#[no_mangle]
pub unsafe extern "C" fn sg_verdict_certificate_json(verdict: *const SgVerdict, out: *mut *mut c_char) -> SgStatus {
    guarded(|| {
        if verdict.is_null() || out.is_null() {
            return fail(SgStatus::NullPointer, "null verdict or output pointer");
        }
        let v = &*verdict;
        let cert = emit_certificate(&v.spec, &v.gens, &v.verdict);
        let text = serde_json::to_string(&cert).expect("serializable");
        *out = CString::new(text).expect("JSON has no NUL").into_raw();
        SgStatus::Ok
    })
}

#[no_mangle]
pub unsafe extern "C" fn sg_verdict_free(verdict: *mut SgVerdict) {
    if !verdict.is_null() {
        drop(Box::from_raw(verdict));
    }
}

/// Sets `*verified` to whether the certificate document checks out.
#[no_mangle]
pub unsafe extern "C" fn sg_verify_certificate(json: *const c_char, verified: *mut bool) -> SgStatus {
    guarded(|| {
        if verified.is_null() {
            return fail(SgStatus::NullPointer, "null output pointer");
        }
        match read_str(json) {
            Ok(text) => {
                *verified = verify_certificate_json(text);
                SgStatus::Ok
            }
            Err(s) => s,
        }
    })
}

/// Power-iteration estimate of the top of the averaging operator on one truncation.
#[no_mangle]
pub unsafe extern "C" fn sg_estimate_top(
    problem: *const SgProblem,
    height: u64,
    power: u32,
    max_iters: usize,
    tol: f64,
    lambda: *mut f64,
) -> SgStatus {
    guarded(|| {
        if problem.is_null() || lambda.is_null() {
            return fail(SgStatus::NullPointer, "null problem or output pointer");
        }
        let p = &*problem;
        let est = Truncation::new(height, power).and_then(|t| estimate_top(&p.spec, &p.gens, t, max_iters, tol));
        match est {
            Ok(e) => {
                *lambda = e.lambda;
                SgStatus::Ok
            }
            Err(e) => fail(SgStatus::SimulationFailed, e.to_string()),
        }
    })
}

#[no_mangle]
pub unsafe extern "C" fn sg_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
