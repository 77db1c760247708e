//! Spectral gap, ergodicity and strong ergodicity of affine actions on solenoids.

pub mod certificate;

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;
use rayon::prelude::*;

use crate::error::{Error, ModuleError};
use crate::linalg::matrix::{RatMatrix, RatVector};
use crate::linalg::rational::Rational;
use crate::module::meataxe::{find_submodule, is_irreducible, simple_submodule_reps, Irreducibility, NortonCertificate};
use crate::module::{restrict, ActionOnSubmodule, Submodule};
use crate::solenoid::{annihilator_lattice, dual_apply, pairing_phase, validate, AffineGen, Character, PhaseAngle, SolenoidSpec};
use crate::zariski::{classify_in, Classification, GroupClass, LieAlgebra, Word, DEFAULT_ENUMERATION_BOUND};

pub use certificate::{
    emit_certificate, verify_certificate, verify_certificate_json, verify_document, Certificate, Question, Verdict,
};

/// Largest order of a finite subgroup of `GL_d(Q)` for `d <= 6`. A finite dual orbit spans a
/// subspace on which the group acts through such a subgroup, so longer orbits are infinite.
const MAX_FINITE_ORDER: [usize; 6] = [2, 12, 48, 1152, 3840, 103_680];

/// Orbit size beyond which [`finite_orbit_search`] declares an orbit infinite.
pub fn orbit_cap(d: usize) -> usize {
    MAX_FINITE_ORDER.get(d.wrapping_sub(1)).copied().unwrap_or(DEFAULT_ENUMERATION_BOUND)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DecideOptions {
    pub seed: u64,
    pub enumeration_bound: usize,
}

impl Default for DecideOptions {
    fn default() -> Self {
        DecideOptions {
            seed: 0,
            enumeration_bound: DEFAULT_ENUMERATION_BOUND,
        }
    }
}

/// A simple submodule of the transposed action that carries a virtually abelian image.
#[derive(Clone, Debug, PartialEq)]
pub struct NoGapWitness {
    pub submodule: Submodule,
    pub class: GroupClass,
    /// Lie algebra of the restricted image (empty for a finite image).
    pub lie: LieAlgebra,
}

/// One simple-submodule representative whose image is not virtually abelian.
#[derive(Clone, Debug, PartialEq)]
pub struct GapEvidence {
    pub submodule: Submodule,
    pub norton: NortonCertificate,
    pub class: GroupClass,
    /// Subalgebra of the Lie algebra of the restricted image.
    pub lie: LieAlgebra,
    pub pair: (RatMatrix, RatMatrix),
}

#[derive(Clone, Debug, PartialEq)]
pub enum GapVerdict {
    Gap { evidence: Vec<GapEvidence> },
    NoGap { witness: NoGapWitness },
    Undecided { reason: String },
}

impl GapVerdict {
    pub fn tag(&self) -> &'static str {
        match self {
            GapVerdict::Gap { .. } => "Gap",
            GapVerdict::NoGap { .. } => "NoGap",
            GapVerdict::Undecided { .. } => "Undecided",
        }
    }

    pub fn witness(&self) -> Option<&NoGapWitness> {
        match self {
            GapVerdict::NoGap { witness } => Some(witness),
            _ => None,
        }
    }
}

/// A nonzero character with finite dual orbit, and what it says about the action on `X/Y`.
#[derive(Clone, Debug, PartialEq)]
pub struct ErgodicWitness {
    pub submodule: Submodule,
    pub chi0: Character,
    pub orbit: Vec<Character>,
    /// Basis of the characters of `X/Y`, the lattice points of the orbit span.
    pub y_lattice: Vec<Character>,
    /// `phases[i][j]`: the translation of generator `i` paired with `orbit[j]`.
    pub phases: Vec<Vec<PhaseAngle>>,
    /// Order of the image of the affine action on `X/Y`.
    pub affine_image_order: Option<u64>,
}

/// A simple submodule with infinite image, witnessed by a word of infinite order.
#[derive(Clone, Debug, PartialEq)]
pub struct InfiniteImage {
    pub submodule: Submodule,
    pub norton: NortonCertificate,
    pub word: Word,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ErgodicVerdict {
    Ergodic { evidence: Vec<InfiniteImage> },
    NotErgodic { witness: ErgodicWitness },
    Undecided { reason: String },
}

impl ErgodicVerdict {
    pub fn tag(&self) -> &'static str {
        match self {
            ErgodicVerdict::Ergodic { .. } => "Ergodic",
            ErgodicVerdict::NotErgodic { .. } => "NotErgodic",
            ErgodicVerdict::Undecided { .. } => "Undecided",
        }
    }
}

/// The spectral gap verdict under its strong ergodicity name.
#[derive(Clone, Debug, PartialEq)]
pub struct StrongErgodicVerdict(pub GapVerdict);

impl StrongErgodicVerdict {
    pub fn tag(&self) -> &'static str {
        match self.0 {
            GapVerdict::Gap { .. } => "StronglyErgodic",
            GapVerdict::NoGap { .. } => "NotStronglyErgodic",
            GapVerdict::Undecided { .. } => "Undecided",
        }
    }
}

impl fmt::Display for GapVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GapVerdict::Gap { evidence } => write!(f, "Gap ({} simple submodule type(s), none virtually abelian)", evidence.len()),
            GapVerdict::NoGap { witness } => {
                write!(f, "NoGap, witness W = {}, class {}", describe_subspace(&witness.submodule), witness.class)
            }
            GapVerdict::Undecided { reason } => write!(f, "Undecided: {reason}"),
        }
    }
}

impl fmt::Display for StrongErgodicVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            GapVerdict::NoGap { witness } => write!(
                f,
                "NotStronglyErgodic, witness W = {}, class {}",
                describe_subspace(&witness.submodule),
                witness.class
            ),
            GapVerdict::Gap { .. } => write!(f, "StronglyErgodic"),
            GapVerdict::Undecided { reason } => write!(f, "Undecided: {reason}"),
        }
    }
}

impl fmt::Display for ErgodicVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ErgodicVerdict::Ergodic { .. } => write!(f, "Ergodic"),
            ErgodicVerdict::NotErgodic { witness } => {
                let orbit: Vec<String> = witness.orbit.iter().map(describe_character).collect();
                write!(f, "NotErgodic, chi0 = {}, orbit {{{}}}", describe_character(&witness.chi0), orbit.join(", "))?;
                if let Some(n) = witness.affine_image_order {
                    write!(f, ", affine image of order {n}")?;
                }
                Ok(())
            }
            ErgodicVerdict::Undecided { reason } => write!(f, "Undecided: {reason}"),
        }
    }
}

pub fn describe_subspace(w: &Submodule) -> String {
    if w.is_full() {
        return format!("Q^{}", w.ambient_dim());
    }
    let vs: Vec<String> = w
        .basis()
        .iter()
        .map(|v| format!("({})", v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")))
        .collect();
    format!("span{{{}}}", vs.join(", "))
}

fn describe_character(c: &Character) -> String {
    if c.vector.len() == 1 {
        c.vector[0].to_string()
    } else {
        format!("({})", c.to_strings().join(", "))
    }
}

/// Transposed matrices; the dual action on characters.
pub fn transposed(gens: &[AffineGen]) -> Vec<RatMatrix> {
    gens.iter().map(|g| g.matrix.transpose()).collect()
}

#[derive(Clone, Debug)]
struct RepAnalysis {
    action: ActionOnSubmodule,
    norton: Option<NortonCertificate>,
    class: Classification,
}

/// Simple-submodule representatives of the transposed action, each classified.
fn analyze(spec: &SolenoidSpec, gens: &[AffineGen], opts: &DecideOptions) -> Result<Vec<RepAnalysis>, ModuleError> {
    let d = spec.d;
    let gt = transposed(gens);
    let reps: Vec<(ActionOnSubmodule, Option<NortonCertificate>)> = match find_submodule(&gt, d, opts.seed)? {
        Irreducibility::Irreducible(cert) => vec![(restrict(&gt, &Submodule::full(d))?, Some(cert))],
        Irreducibility::Reducible(_) => simple_submodule_reps(&gt, d, opts.seed)?
            .into_iter()
            .map(|a| (a, None))
            .collect(),
    };
    let results: Vec<Result<RepAnalysis, ModuleError>> = reps
        .into_par_iter()
        .map(|(action, norton)| {
            let k = action.submodule.dim();
            let class = classify_in(k, &action.restricted_gens, opts.enumeration_bound)
                .expect("restrictions of invertible matrices are invertible");
            let norton = match norton {
                Some(c) => Some(c),
                None => match is_irreducible(&action.restricted_gens, k, opts.seed)? {
                    Irreducibility::Irreducible(c) => Some(c),
                    Irreducibility::Reducible(_) => None,
                },
            };
            Ok(RepAnalysis { action, norton, class })
        })
        .collect();
    results.into_iter().collect()
}

fn checked(spec: &SolenoidSpec, gens: &[AffineGen]) -> Result<Vec<AffineGen>, Error> {
    Ok(validate(spec, gens)?)
}

pub fn decide_spectral_gap(spec: &SolenoidSpec, gens: &[AffineGen]) -> Result<GapVerdict, Error> {
    decide_spectral_gap_with(spec, gens, &DecideOptions::default())
}

pub fn decide_spectral_gap_with(spec: &SolenoidSpec, gens: &[AffineGen], opts: &DecideOptions) -> Result<GapVerdict, Error> {
    let gens = checked(spec, gens)?;
    let reps = match analyze(spec, &gens, opts) {
        Ok(r) => r,
        Err(e @ ModuleError::ProbeExhausted { .. }) => return Ok(GapVerdict::Undecided { reason: e.to_string() }),
        Err(e) => return Err(e.into()),
    };
    Ok(gap_from(reps))
}

fn gap_from(reps: Vec<RepAnalysis>) -> GapVerdict {
    if let Some(r) = reps.iter().find(|r| r.class.class.virtually_abelian() == Some(true)) {
        return GapVerdict::NoGap {
            witness: NoGapWitness {
                submodule: r.action.submodule.clone(),
                class: r.class.class.clone(),
                lie: r.class.lie.clone(),
            },
        };
    }
    let mut evidence = Vec::new();
    for r in reps {
        if let GroupClass::Undecided(reason) = &r.class.class {
            return GapVerdict::Undecided {
                reason: format!("submodule {}: {reason}", describe_subspace(&r.action.submodule)),
            };
        }
        let Some(norton) = r.norton else {
            return GapVerdict::Undecided {
                reason: "no irreducibility certificate for a socle representative".into(),
            };
        };
        let Some(pair) = r.class.lower.nonabelian_pair() else {
            return GapVerdict::Undecided {
                reason: "no nonabelian pair in the exact part of the Lie algebra".into(),
            };
        };
        evidence.push(GapEvidence {
            submodule: r.action.submodule,
            norton,
            class: r.class.class,
            lie: r.class.lower,
            pair,
        });
    }
    GapVerdict::Gap { evidence }
}

pub fn decide_strong_ergodicity(spec: &SolenoidSpec, gens: &[AffineGen]) -> Result<StrongErgodicVerdict, Error> {
    decide_strong_ergodicity_with(spec, gens, &DecideOptions::default())
}

pub fn decide_strong_ergodicity_with(
    spec: &SolenoidSpec,
    gens: &[AffineGen],
    opts: &DecideOptions,
) -> Result<StrongErgodicVerdict, Error> {
    Ok(StrongErgodicVerdict(decide_spectral_gap_with(spec, gens, opts)?))
}

pub fn decide_ergodicity(spec: &SolenoidSpec, gens: &[AffineGen]) -> Result<ErgodicVerdict, Error> {
    decide_ergodicity_with(spec, gens, &DecideOptions::default())
}

pub fn decide_ergodicity_with(spec: &SolenoidSpec, gens: &[AffineGen], opts: &DecideOptions) -> Result<ErgodicVerdict, Error> {
    let gens = checked(spec, gens)?;
    let reps = match analyze(spec, &gens, opts) {
        Ok(r) => r,
        Err(e @ ModuleError::ProbeExhausted { .. }) => return Ok(ErgodicVerdict::Undecided { reason: e.to_string() }),
        Err(e) => return Err(e.into()),
    };
    if let Some(r) = reps.iter().find(|r| matches!(r.class.class, GroupClass::Finite(_))) {
        return Ok(ErgodicVerdict::NotErgodic {
            witness: ergodic_witness(spec, &gens, &r.action.submodule, opts.enumeration_bound),
        });
    }
    let mut evidence = Vec::new();
    for r in reps {
        let (Some(word), Some(norton)) = (r.class.infinite_word, r.norton) else {
            return Ok(ErgodicVerdict::Undecided {
                reason: format!(
                    "could not decide finiteness on submodule {}: {}",
                    describe_subspace(&r.action.submodule),
                    r.class.class
                ),
            });
        };
        evidence.push(InfiniteImage {
            submodule: r.action.submodule,
            norton,
            word,
        });
    }
    Ok(ErgodicVerdict::Ergodic { evidence })
}

/// Forward orbit of `chi` under the dual action, or `None` once it exceeds `cap` elements.
pub fn dual_orbit(gens: &[AffineGen], chi: &Character, cap: usize) -> Option<Vec<Character>> {
    let mut seen: HashSet<Character> = HashSet::new();
    let mut out = vec![chi.clone()];
    seen.insert(chi.clone());
    let mut queue = VecDeque::from([chi.clone()]);
    while let Some(c) = queue.pop_front() {
        for g in gens {
            let next = dual_apply(g, &c);
            if seen.insert(next.clone()) {
                if seen.len() > cap {
                    return None;
                }
                out.push(next.clone());
                queue.push_back(next);
            }
        }
    }
    Some(out)
}

pub(crate) fn ergodic_witness(spec: &SolenoidSpec, gens: &[AffineGen], w: &Submodule, bound: usize) -> ErgodicWitness {
    let chi0 = annihilator_lattice(w, spec)
        .into_iter()
        .next()
        .expect("a nonzero rational subspace has lattice points");
    let orbit = dual_orbit(gens, &chi0, bound).expect("finite image gives a finite orbit");
    let span = Submodule::span(spec.d, &orbit.iter().map(|c| c.vector.clone()).collect::<Vec<_>>());
    let y_lattice = annihilator_lattice(&span, spec);
    let phases = orbit_phases(spec, gens, &orbit);
    let affine_image_order = affine_image_order(spec, gens, &y_lattice, bound);
    ErgodicWitness {
        submodule: w.clone(),
        chi0,
        orbit,
        y_lattice,
        phases,
        affine_image_order,
    }
}

pub(crate) fn orbit_phases(spec: &SolenoidSpec, gens: &[AffineGen], orbit: &[Character]) -> Vec<Vec<PhaseAngle>> {
    gens.iter()
        .map(|g| orbit.iter().map(|c| pairing_phase(c, &g.translation, spec)).collect())
        .collect()
}

/// Coordinates of `v` in the lattice basis `b` (columns), assuming `v` lies in its span.
fn lattice_coords(b: &[Character], v: &[Rational]) -> Option<RatVector> {
    let m = RatMatrix::from_columns(v.len(), &b.iter().map(|c| c.vector.clone()).collect::<Vec<_>>());
    // the columns are independent, so the normal equations have a unique solution
    let mt = m.transpose();
    let x = (&mt * &m).inverse()?.mul_vec(&mt.mul_vec(v));
    (m.mul_vec(&x) == v).then_some(x)
}

/// Order of the group of affine maps of `X/Y` induced by the generators; `None` past `bound`.
///
/// An element is the linear action on the lattice basis together with phases on that basis.
pub(crate) fn affine_image_order(spec: &SolenoidSpec, gens: &[AffineGen], lattice: &[Character], bound: usize) -> Option<u64> {
    let k = lattice.len();
    if k == 0 {
        return Some(1);
    }
    type Elem = (RatMatrix, Vec<Rational>);
    let mut generators: Vec<Elem> = Vec::new();
    for g in gens {
        let mut cols = Vec::with_capacity(k);
        for b in lattice {
            cols.push(lattice_coords(lattice, &dual_apply(g, b).vector)?);
        }
        let phases = lattice
            .iter()
            .map(|b| pairing_phase(b, &g.translation, spec).0)
            .collect();
        generators.push((RatMatrix::from_columns(k, &cols), phases));
    }
    // (A, phi) . (A', phi') acts as A' first, then A with phi read at the image
    let compose = |x: &Elem, y: &Elem| -> Elem {
        let (a, phi) = x;
        let (a2, phi2) = y;
        let mut out = phi2.clone();
        for (i, o) in out.iter_mut().enumerate() {
            let mut s = o.clone();
            for (j, p) in phi.iter().enumerate() {
                s += &a2[(j, i)] * p;
            }
            *o = crate::linalg::rational::frac(&s);
        }
        (a * a2, out)
    };
    let id: Elem = (RatMatrix::identity(k), vec![Rational::zero(); k]);
    let mut seen: HashSet<Elem> = HashSet::from([id.clone()]);
    let mut queue = VecDeque::from([id]);
    while let Some(x) = queue.pop_front() {
        for g in &generators {
            let y = compose(g, &x);
            if seen.insert(y.clone()) {
                if seen.len() > bound {
                    return None;
                }
                queue.push_back(y);
            }
        }
    }
    Some(seen.len() as u64)
}

/// Every nonzero character `v / a^k` with `|v_i| <= height_bound` and `k <= power_bound` whose
/// dual orbit has at most `orbit_cap` elements, one entry per orbit.
///
/// The representative of an orbit is its lexicographically largest enumerated element; orbits are
/// listed by breadth-first search from it and sorted by the height of the representative.
pub fn finite_orbit_search_capped(
    spec: &SolenoidSpec,
    gens: &[AffineGen],
    height_bound: u64,
    power_bound: u32,
    orbit_cap: usize,
) -> Vec<(Character, Vec<Character>)> {
    let d = spec.d;
    let h = height_bound as i64;
    let max_k = if spec.a == 1 { 0 } else { power_bound };
    let mut candidates: BTreeSet<Character> = BTreeSet::new();
    let mut v = vec![-h; d];
    loop {
        if v.iter().any(|x| *x != 0) {
            for k in 0..=max_k {
                let den = BigInt::from(spec.a).pow(k);
                candidates.insert(Character::new(
                    v.iter().map(|x| Rational::new(BigInt::from(*x), den.clone())).collect(),
                ));
            }
        }
        let mut i = 0;
        while i < d && v[i] == h {
            v[i] = -h;
            i += 1;
        }
        if i == d {
            break;
        }
        v[i] += 1;
    }
    let mut covered: HashSet<Character> = HashSet::new();
    let mut out = Vec::new();
    for c in candidates.iter().rev() {
        if covered.contains(c) {
            continue;
        }
        if let Some(orbit) = dual_orbit(gens, c, orbit_cap) {
            let rep = orbit
                .iter()
                .filter(|x| candidates.contains(*x))
                .max()
                .cloned()
                .unwrap_or_else(|| c.clone());
            let orbit = dual_orbit(gens, &rep, orbit_cap).expect("same orbit");
            covered.extend(orbit.iter().cloned());
            out.push((rep, orbit));
        }
    }
    out.sort_by(|x, y| character_height(&x.0).cmp(&character_height(&y.0)).then_with(|| y.0.cmp(&x.0)));
    out
}

pub fn finite_orbit_search(
    spec: &SolenoidSpec,
    gens: &[AffineGen],
    height_bound: u64,
    power_bound: u32,
) -> Vec<(Character, Vec<Character>)> {
    finite_orbit_search_capped(spec, gens, height_bound, power_bound, orbit_cap(spec.d))
}

/// `(denominator, max |numerator|)` of a character written over a common denominator.
pub fn character_height(c: &Character) -> (BigInt, BigInt) {
    let den = crate::linalg::rational::lcm_of_denominators(&c.vector);
    let h = c
        .vector
        .iter()
        .map(|x| num_traits::Signed::abs(&(x * Rational::from_integer(den.clone())).to_integer()))
        .max()
        .unwrap_or_default();
    (den, h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rational::rat;

    fn spec(a: u64, d: usize) -> SolenoidSpec {
        SolenoidSpec::new(a, d).unwrap()
    }
    fn lin(rows: &[&[i64]]) -> AffineGen {
        AffineGen::linear(RatMatrix::from_i64(rows))
    }
    fn chars(xs: &[i64]) -> Vec<Character> {
        xs.iter().map(|x| Character::new(vec![rat(*x)])).collect()
    }

    #[test]
    fn gap_examples() {
        let v = decide_spectral_gap(&spec(1, 2), &[lin(&[&[2, 1], &[1, 1]])]).unwrap();
        let w = v.witness().unwrap();
        assert!(w.submodule.is_full());
        assert_eq!(w.class, GroupClass::VirtuallyAbelian);

        let v = decide_spectral_gap(&spec(1, 2), &[lin(&[&[0, -1], &[1, 0]]), lin(&[&[1, 1], &[0, 1]])]).unwrap();
        assert_eq!(v.tag(), "Gap");

        let v = decide_spectral_gap(&spec(6, 1), &[lin(&[&[2]]), lin(&[&[3]])]).unwrap();
        assert!(v.witness().unwrap().submodule.is_full());
    }

    #[test]
    fn ergodic_examples() {
        let s = spec(1, 1);
        let rot = AffineGen {
            matrix: RatMatrix::identity(1),
            translation: vec![Rational::new(1.into(), 3.into())],
        };
        match decide_ergodicity(&s, &[rot]).unwrap() {
            ErgodicVerdict::NotErgodic { witness } => {
                assert_eq!(witness.chi0, chars(&[1])[0]);
                assert_eq!(witness.orbit, chars(&[1]));
                assert_eq!(witness.y_lattice, chars(&[1]));
                assert_eq!(witness.affine_image_order, Some(3));
            }
            v => panic!("{v:?}"),
        }
        match decide_ergodicity(&s, &[lin(&[&[-1]])]).unwrap() {
            ErgodicVerdict::NotErgodic { witness } => assert_eq!(witness.orbit, chars(&[1, -1])),
            v => panic!("{v:?}"),
        }
        let v = decide_ergodicity(&spec(1, 2), &[lin(&[&[0, -1], &[1, 0]]), lin(&[&[1, 1], &[0, 1]])]).unwrap();
        assert_eq!(v.tag(), "Ergodic");
    }

    #[test]
    fn degenerate_and_strong() {
        let s = spec(1, 1);
        assert_eq!(decide_ergodicity(&s, &[]).unwrap().tag(), "NotErgodic");
        assert_eq!(decide_spectral_gap(&s, &[]).unwrap().tag(), "NoGap");
        assert_eq!(decide_strong_ergodicity(&s, &[]).unwrap().tag(), "NotStronglyErgodic");
        let sl2 = [lin(&[&[0, -1], &[1, 0]]), lin(&[&[1, 1], &[0, 1]])];
        assert_eq!(decide_strong_ergodicity(&spec(1, 2), &sl2).unwrap().tag(), "StronglyErgodic");
    }

    #[test]
    fn orbit_search_examples() {
        let found = finite_orbit_search(&spec(1, 1), &[lin(&[&[-1]])], 3, 0);
        let expect: Vec<(Character, Vec<Character>)> = (1..=3)
            .map(|k| (chars(&[k])[0].clone(), chars(&[k, -k])))
            .collect();
        assert_eq!(found, expect);
        assert!(finite_orbit_search(&spec(1, 2), &[lin(&[&[2, 1], &[1, 1]])], 10, 0).is_empty());
        let trivial = finite_orbit_search(&spec(1, 2), &[], 2, 0);
        assert_eq!(trivial.len(), 24);
        assert!(trivial.iter().all(|(c, o)| o == &vec![c.clone()]));
    }
}
