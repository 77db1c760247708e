//! Certificate documents and their independent verification.

use std::collections::HashSet;
use std::panic::{catch_unwind, AssertUnwindSafe};

use serde::{Deserialize, Serialize};

use super::{
    affine_image_order, transposed, ErgodicVerdict, ErgodicWitness, GapEvidence, GapVerdict, InfiniteImage, NoGapWitness,
    StrongErgodicVerdict,
};
use crate::linalg::matrix::RatMatrix;
use crate::linalg::rational::parse_rational;
use crate::module::meataxe::{verify_norton, NortonCertificate, NortonJson};
use crate::module::{restrict, ActionOnSubmodule, Submodule, SubmoduleJson};
use crate::solenoid::{annihilator_lattice, dual_apply, pairing_phase, AffineGen, Character, ProblemJson, SolenoidSpec};
use crate::zariski::{
    closure_data, enumerate_group, lie_of_cyclic, parse_matrix, word_matrix, GroupClass, LieAlgebra, LieAlgebraJson,
    DEFAULT_ENUMERATION_BOUND,
};

pub const TOOL_VERSION: &str = concat!("solgap ", env!("CARGO_PKG_VERSION"));

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Question {
    Gap,
    Ergodic,
    Strong,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WitnessJson {
    InvariantSubspace {
        submodule: SubmoduleJson,
        class: GroupClass,
        lie: LieAlgebraJson,
    },
    FiniteOrbit {
        submodule: SubmoduleJson,
        chi0: Vec<String>,
        orbit: Vec<Vec<String>>,
        y_lattice: Vec<Vec<String>>,
        /// One row per generator, one angle per orbit element.
        phases: Vec<Vec<String>>,
        affine_image_order: Option<u64>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EvidenceJson {
    NonabelianImage {
        submodule: SubmoduleJson,
        norton: NortonJson,
        class: GroupClass,
        lie: LieAlgebraJson,
        pair: [Vec<Vec<String>>; 2],
    },
    InfiniteImage {
        submodule: SubmoduleJson,
        norton: NortonJson,
        word: Vec<i64>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub question: Question,
    pub verdict: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub evidence: Option<Vec<EvidenceJson>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    pub replay_data: ProblemJson,
    pub tool_version: String,
}

/// Any of the three verdicts.
#[derive(Clone, Debug, PartialEq)]
pub enum Verdict {
    Gap(GapVerdict),
    Ergodic(ErgodicVerdict),
    Strong(StrongErgodicVerdict),
}

impl Verdict {
    pub fn tag(&self) -> &'static str {
        match self {
            Verdict::Gap(v) => v.tag(),
            Verdict::Ergodic(v) => v.tag(),
            Verdict::Strong(v) => v.tag(),
        }
    }

    pub fn question(&self) -> Question {
        match self {
            Verdict::Gap(_) => Question::Gap,
            Verdict::Ergodic(_) => Question::Ergodic,
            Verdict::Strong(_) => Question::Strong,
        }
    }
}

fn nogap_json(w: &NoGapWitness) -> WitnessJson {
    WitnessJson::InvariantSubspace {
        submodule: w.submodule.to_json(),
        class: w.class.clone(),
        lie: w.lie.to_json(),
    }
}

fn gap_json(e: &GapEvidence) -> EvidenceJson {
    EvidenceJson::NonabelianImage {
        submodule: e.submodule.to_json(),
        norton: e.norton.to_json(),
        class: e.class.clone(),
        lie: e.lie.to_json(),
        pair: [e.pair.0.to_strings(), e.pair.1.to_strings()],
    }
}

fn orbit_json(w: &ErgodicWitness) -> WitnessJson {
    WitnessJson::FiniteOrbit {
        submodule: w.submodule.to_json(),
        chi0: w.chi0.to_strings(),
        orbit: w.orbit.iter().map(Character::to_strings).collect(),
        y_lattice: w.y_lattice.iter().map(Character::to_strings).collect(),
        phases: w
            .phases
            .iter()
            .map(|row| row.iter().map(|p| crate::linalg::rational::format_rational(&p.0)).collect())
            .collect(),
        affine_image_order: w.affine_image_order,
    }
}

fn infinite_json(e: &InfiniteImage) -> EvidenceJson {
    EvidenceJson::InfiniteImage {
        submodule: e.submodule.to_json(),
        norton: e.norton.to_json(),
        word: e.word.clone(),
    }
}

fn gap_parts(v: &GapVerdict) -> (Option<WitnessJson>, Option<Vec<EvidenceJson>>, Option<String>) {
    match v {
        GapVerdict::Gap { evidence } => (None, Some(evidence.iter().map(gap_json).collect()), None),
        GapVerdict::NoGap { witness } => (Some(nogap_json(witness)), None, None),
        GapVerdict::Undecided { reason } => (None, None, Some(reason.clone())),
    }
}

pub fn emit_certificate(spec: &SolenoidSpec, gens: &[AffineGen], verdict: &Verdict) -> Certificate {
    let (witness, evidence, reason) = match verdict {
        Verdict::Gap(v) | Verdict::Strong(StrongErgodicVerdict(v)) => gap_parts(v),
        Verdict::Ergodic(ErgodicVerdict::Ergodic { evidence }) => {
            (None, Some(evidence.iter().map(infinite_json).collect()), None)
        }
        Verdict::Ergodic(ErgodicVerdict::NotErgodic { witness }) => (Some(orbit_json(witness)), None, None),
        Verdict::Ergodic(ErgodicVerdict::Undecided { reason }) => (None, None, Some(reason.clone())),
    };
    Certificate {
        question: verdict.question(),
        verdict: verdict.tag().to_string(),
        witness,
        evidence,
        reason,
        replay_data: ProblemJson::from_parts(spec, gens),
        tool_version: TOOL_VERSION.to_string(),
    }
}

/// Re-checks a verdict against the problem it claims to decide.
pub fn verify_certificate(spec: &SolenoidSpec, gens: &[AffineGen], verdict: &Verdict) -> bool {
    verify_document(&emit_certificate(spec, gens, verdict))
}

pub fn verify_certificate_json(text: &str) -> bool {
    match serde_json::from_str::<Certificate>(text) {
        Ok(c) => verify_document(&c),
        Err(_) => false,
    }
}

/// Never panics; any malformed or inconsistent field yields `false`.
pub fn verify_document(cert: &Certificate) -> bool {
    catch_unwind(AssertUnwindSafe(|| check(cert))).unwrap_or(false)
}

fn check(cert: &Certificate) -> bool {
    let Ok((spec, gens)) = cert.replay_data.to_parts() else {
        return false;
    };
    let gt = transposed(&gens);
    let (w, e) = (&cert.witness, &cert.evidence);
    match (cert.question, cert.verdict.as_str()) {
        (_, "Undecided") => w.is_none() && e.is_none(),
        (Question::Gap, "NoGap") | (Question::Strong, "NotStronglyErgodic") => match (w, e) {
            (Some(WitnessJson::InvariantSubspace { submodule, class, lie }), None) => {
                check_nogap(&spec, &gt, submodule, class, lie)
            }
            _ => false,
        },
        (Question::Gap, "Gap") | (Question::Strong, "StronglyErgodic") => match (w, e) {
            (None, Some(ev)) if !ev.is_empty() => ev.iter().all(|x| match x {
                EvidenceJson::NonabelianImage {
                    submodule,
                    norton,
                    lie,
                    pair,
                    class,
                } => check_nonabelian(&spec, &gt, submodule, norton, class, lie, pair),
                _ => false,
            }),
            _ => false,
        },
        (Question::Ergodic, "NotErgodic") => match (w, e) {
            (Some(WitnessJson::FiniteOrbit {
                submodule,
                chi0,
                orbit,
                y_lattice,
                phases,
                affine_image_order: order,
            }), None) => check_orbit(&spec, &gens, &gt, submodule, chi0, orbit, y_lattice, phases, *order),
            _ => false,
        },
        (Question::Ergodic, "Ergodic") => match (w, e) {
            (None, Some(ev)) if !ev.is_empty() => ev.iter().all(|x| match x {
                EvidenceJson::InfiniteImage { submodule, norton, word } => {
                    check_infinite(&spec, &gt, submodule, norton, word)
                }
                _ => false,
            }),
            _ => false,
        },
        _ => false,
    }
}

/// A nonzero invariant subspace stored in reduced echelon form, with the restricted action.
fn checked_action(spec: &SolenoidSpec, gt: &[RatMatrix], j: &SubmoduleJson) -> Option<ActionOnSubmodule> {
    let w = Submodule::from_json(j)?;
    if w.ambient_dim() != spec.d || w.is_zero() {
        return None;
    }
    if Submodule::span(spec.d, w.basis()).basis() != w.basis() {
        return None;
    }
    if !w.is_invariant(gt) {
        return None;
    }
    restrict(gt, &w).ok()
}

fn independent_lie(k: usize, j: &LieAlgebraJson) -> Option<LieAlgebra> {
    let l = LieAlgebra::from_json(k, j)?;
    if l.basis.iter().any(RatMatrix::is_zero) || LieAlgebra::span(k, &l.basis, true).dim() != l.dim() {
        return None;
    }
    Some(l)
}

fn check_nogap(spec: &SolenoidSpec, gt: &[RatMatrix], sub: &SubmoduleJson, class: &GroupClass, lie: &LieAlgebraJson) -> bool {
    let Some(action) = checked_action(spec, gt, sub) else {
        return false;
    };
    let k = action.submodule.dim();
    let g = &action.restricted_gens;
    let Some(stored) = independent_lie(k, lie) else {
        return false;
    };
    match class {
        GroupClass::Finite(n) => {
            stored.is_zero()
                && usize::try_from(*n).is_ok_and(|n| {
                    n <= DEFAULT_ENUMERATION_BOUND && enumerate_group(g, k, n).is_some_and(|all| all.len() == n)
                })
        }
        GroupClass::VirtuallyAbelian => {
            if stored.is_zero() || !stored.is_bracket_closed() || !stored.is_ad_invariant(g) || !stored.is_abelian() {
                return false;
            }
            closure_data(k, g).is_ok_and(|c| stored.same_space(&c.lie))
        }
        _ => false,
    }
}

fn checked_norton(k: usize, g: &[RatMatrix], j: &NortonJson) -> bool {
    match NortonCertificate::from_json(j) {
        Some(c) if c.theta.rows() == k && c.factor.degree().is_some() => verify_norton(g, k, &c),
        _ => false,
    }
}

fn check_nonabelian(
    spec: &SolenoidSpec,
    gt: &[RatMatrix],
    sub: &SubmoduleJson,
    norton: &NortonJson,
    class: &GroupClass,
    lie: &LieAlgebraJson,
    pair: &[Vec<Vec<String>>; 2],
) -> bool {
    if class.virtually_abelian() != Some(false) {
        return false;
    }
    let Some(action) = checked_action(spec, gt, sub) else {
        return false;
    };
    let k = action.submodule.dim();
    let g = &action.restricted_gens;
    if !checked_norton(k, g, norton) {
        return false;
    }
    let Some(stored) = independent_lie(k, lie) else {
        return false;
    };
    let (Some(x), Some(y)) = (parse_matrix(k, &pair[0]), parse_matrix(k, &pair[1])) else {
        return false;
    };
    if !stored.contains(&x) || !stored.contains(&y) || x.bracket(&y).is_zero() {
        return false;
    }
    closure_data(k, g).is_ok_and(|c| stored.same_space(&c.lower))
}

#[allow(clippy::too_many_arguments)]
fn check_orbit(
    spec: &SolenoidSpec,
    gens: &[AffineGen],
    gt: &[RatMatrix],
    sub: &SubmoduleJson,
    chi0: &[String],
    orbit: &[Vec<String>],
    y_lattice: &[Vec<String>],
    phases: &[Vec<String>],
    order: Option<u64>,
) -> bool {
    let Some(action) = checked_action(spec, gt, sub) else {
        return false;
    };
    let parse = |v: &[String]| Character::from_strings(v).filter(|c| c.vector.len() == spec.d);
    let Some(chi0) = parse(chi0) else {
        return false;
    };
    let Some(orbit): Option<Vec<Character>> = orbit.iter().map(|v| parse(v)).collect() else {
        return false;
    };
    let Some(y): Option<Vec<Character>> = y_lattice.iter().map(|v| parse(v)).collect() else {
        return false;
    };
    if chi0.is_zero() || !action.submodule.contains(&chi0.vector) {
        return false;
    }
    let set: HashSet<&Character> = orbit.iter().collect();
    if set.len() != orbit.len() || !set.contains(&chi0) {
        return false;
    }
    if !orbit.iter().all(|c| c.vector.iter().all(|x| spec.admits_denominator(x))) {
        return false;
    }
    if !orbit.iter().all(|c| gens.iter().all(|g| set.contains(&dual_apply(g, c)))) {
        return false;
    }
    let span = Submodule::span(spec.d, &orbit.iter().map(|c| c.vector.clone()).collect::<Vec<_>>());
    if annihilator_lattice(&span, spec) != y {
        return false;
    }
    if phases.len() != gens.len() {
        return false;
    }
    for (g, row) in gens.iter().zip(phases) {
        if row.len() != orbit.len() {
            return false;
        }
        for (c, p) in orbit.iter().zip(row) {
            match parse_rational(p) {
                Ok(p) if p == pairing_phase(c, &g.translation, spec).0 => {}
                _ => return false,
            }
        }
    }
    match order {
        Some(n) => affine_image_order(spec, gens, &y, DEFAULT_ENUMERATION_BOUND) == Some(n),
        None => true,
    }
}

fn check_infinite(spec: &SolenoidSpec, gt: &[RatMatrix], sub: &SubmoduleJson, norton: &NortonJson, word: &[i64]) -> bool {
    let Some(action) = checked_action(spec, gt, sub) else {
        return false;
    };
    let k = action.submodule.dim();
    let g = &action.restricted_gens;
    let m = g.len() as i64;
    if word.is_empty() || word.iter().any(|&x| x == 0 || x.abs() > m) {
        return false;
    }
    if !checked_norton(k, g, norton) {
        return false;
    }
    let inverses: Vec<RatMatrix> = g.iter().map(|x| x.inverse().expect("restriction of a unit")).collect();
    lie_of_cyclic(&word_matrix(g, &inverses, k, word)).is_ok_and(|l| !l.is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decide::{decide_ergodicity, decide_spectral_gap};
    use crate::linalg::rational::Rational;

    fn lin(rows: &[&[i64]]) -> AffineGen {
        AffineGen::linear(RatMatrix::from_i64(rows))
    }

    #[test]
    fn hyperbolic_round_trip_and_tampering() {
        let spec = SolenoidSpec::new(1, 2).unwrap();
        let gens = [lin(&[&[2, 1], &[1, 1]])];
        let v = Verdict::Gap(decide_spectral_gap(&spec, &gens).unwrap());
        assert!(verify_certificate(&spec, &gens, &v));
        let mut cert = emit_certificate(&spec, &gens, &v);
        let text = serde_json::to_string(&cert).unwrap();
        assert!(verify_certificate_json(&text));
        // replace W by a line that is not invariant
        if let Some(WitnessJson::InvariantSubspace { submodule, .. }) = &mut cert.witness {
            submodule.basis = vec![vec!["1".into(), "0".into()]];
        }
        assert!(!verify_document(&cert));
        assert!(!verify_certificate_json("{not json"));
    }

    #[test]
    fn orbit_deletion_rejected() {
        let spec = SolenoidSpec::new(1, 1).unwrap();
        let gens = [lin(&[&[-1]])];
        let v = Verdict::Ergodic(decide_ergodicity(&spec, &gens).unwrap());
        assert!(verify_certificate(&spec, &gens, &v));
        let mut cert = emit_certificate(&spec, &gens, &v);
        if let Some(WitnessJson::FiniteOrbit { orbit, phases, .. }) = &mut cert.witness {
            orbit.pop();
            phases[0].pop();
        }
        assert!(!verify_document(&cert));
    }

    #[test]
    fn gap_and_translation_round_trip() {
        let spec = SolenoidSpec::new(1, 2).unwrap();
        let gens = [lin(&[&[0, -1], &[1, 0]]), lin(&[&[1, 1], &[0, 1]])];
        let v = Verdict::Gap(decide_spectral_gap(&spec, &gens).unwrap());
        assert!(verify_certificate(&spec, &gens, &v));
        let v = Verdict::Ergodic(decide_ergodicity(&spec, &gens).unwrap());
        assert!(verify_certificate(&spec, &gens, &v));

        let spec = SolenoidSpec::new(1, 1).unwrap();
        let rot = [AffineGen {
            matrix: RatMatrix::identity(1),
            translation: vec![Rational::new(1.into(), 3.into())],
        }];
        let v = Verdict::Ergodic(decide_ergodicity(&spec, &rot).unwrap());
        assert!(verify_certificate(&spec, &rot, &v));
    }
}
