#![allow(dead_code)]

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use solenoid_gap::decide::certificate::{EvidenceJson, WitnessJson};
use solenoid_gap::decide::Certificate;
use solenoid_gap::linalg::matrix::RatMatrix;
use solenoid_gap::linalg::rational::{rat, Rational};
use solenoid_gap::solenoid::{AffineGen, SolenoidSpec};

pub fn q(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn lin(rows: &[&[i64]]) -> AffineGen {
    AffineGen::linear(RatMatrix::from_i64(rows))
}

pub fn spec(a: u64, d: usize) -> SolenoidSpec {
    SolenoidSpec::new(a, d).unwrap()
}

pub struct Case {
    pub name: &'static str,
    pub spec: SolenoidSpec,
    pub gens: Vec<AffineGen>,
}

pub fn s() -> AffineGen {
    lin(&[&[0, -1], &[1, 0]])
}

pub fn t() -> AffineGen {
    lin(&[&[1, 1], &[0, 1]])
}

pub fn hyperbolic() -> AffineGen {
    lin(&[&[2, 1], &[1, 1]])
}

/// The hand-derived verdict corpus.
pub fn corpus() -> Vec<Case> {
    vec![
        Case { name: "hyperbolic", spec: spec(1, 2), gens: vec![hyperbolic()] },
        Case { name: "sl2", spec: spec(1, 2), gens: vec![s(), t()] },
        Case {
            name: "rotation-1/3",
            spec: spec(1, 1),
            gens: vec![AffineGen { matrix: RatMatrix::identity(1), translation: vec![q(1, 3)] }],
        },
        Case { name: "negation", spec: spec(1, 1), gens: vec![lin(&[&[-1]])] },
        Case { name: "times-2", spec: spec(2, 1), gens: vec![lin(&[&[2]])] },
        Case { name: "times-2-3", spec: spec(6, 1), gens: vec![lin(&[&[2]]), lin(&[&[3]])] },
        Case {
            name: "heisenberg",
            spec: spec(1, 3),
            gens: vec![lin(&[&[1, 1, 0], &[0, 1, 0], &[0, 0, 1]]), lin(&[&[1, 0, 0], &[0, 1, 1], &[0, 0, 1]])],
        },
        Case { name: "hyperbolic-plus-1", spec: spec(1, 3), gens: vec![lin(&[&[2, 1, 0], &[1, 1, 0], &[0, 0, 1]])] },
        Case { name: "empty", spec: spec(1, 1), gens: vec![] },
    ]
}

pub fn random_rational_translation(rng: &mut ChaCha8Rng, d: usize) -> Vec<Rational> {
    (0..d).map(|_| q(rng.gen_range(-6..=6), rng.gen_range(1..=7))).collect()
}

/// A random integer matrix with entries in `[-height, height]` whose determinant is a unit of `Z[1/a]`.
pub fn random_unit_matrix(rng: &mut ChaCha8Rng, spec: &SolenoidSpec, height: i64) -> RatMatrix {
    let d = spec.d;
    loop {
        let data: Vec<Rational> = (0..d * d).map(|_| rat(rng.gen_range(-height..=height))).collect();
        let m = RatMatrix::from_vec(d, d, data);
        if spec.is_unit(&m.determinant()) {
            return m;
        }
    }
}

/// Random problem with `d <= max_d`, a in {1, 2, 3, 6}, integer entries of height at most `height`.
pub fn random_instance(rng: &mut ChaCha8Rng, max_d: usize, height: i64) -> (SolenoidSpec, Vec<AffineGen>) {
    let d = rng.gen_range(1..=max_d);
    let a = [1, 1, 1, 2, 3, 6][rng.gen_range(0..6)];
    let sp = spec(a, d);
    let count = [0, 1, 1, 1, 2, 2, 2, 3][rng.gen_range(0..8)];
    let mut gens = Vec::new();
    for _ in 0..count {
        let m = random_unit_matrix(rng, &sp, height);
        let translation = if rng.gen_bool(0.3) {
            random_rational_translation(rng, d)
        } else {
            vec![Rational::zero(); d]
        };
        gens.push(AffineGen { matrix: m, translation });
    }
    (sp, gens)
}

/// A random element of `GL_d(Z[1/a])`: a product of elementary matrices and unit scalings.
pub fn random_conjugator(rng: &mut ChaCha8Rng, spec: &SolenoidSpec) -> RatMatrix {
    let d = spec.d;
    let mut h = RatMatrix::identity(d);
    for _ in 0..4 {
        let mut e = RatMatrix::identity(d);
        if d > 1 && rng.gen_bool(0.7) {
            let i = rng.gen_range(0..d);
            let mut j = rng.gen_range(0..d);
            while j == i {
                j = rng.gen_range(0..d);
            }
            e[(i, j)] = rat(rng.gen_range(-2..=2));
        } else {
            let i = rng.gen_range(0..d);
            let mut x = if rng.gen_bool(0.5) { rat(-1) } else { rat(1) };
            if let Some(&p) = spec.primes.first() {
                if rng.gen_bool(0.5) {
                    x *= q(p as i64, 1);
                }
            }
            e[(i, i)] = x;
        }
        h = &h * &e;
    }
    h
}

pub fn conjugate(gens: &[AffineGen], h: &RatMatrix) -> Vec<AffineGen> {
    let hi = h.inverse().unwrap();
    gens.iter()
        .map(|g| AffineGen {
            matrix: &(h * &g.matrix) * &hi,
            translation: h.mul_vec(&g.translation),
        })
        .collect()
}

// ---------- independent oracles ----------

fn is_rational_square(x: &Rational) -> Option<Rational> {
    if x.is_negative() {
        return None;
    }
    let (n, d) = (x.numer(), x.denom());
    let (rn, rd) = (n.sqrt(), d.sqrt());
    (&rn * &rn == *n && &rd * &rd == *d).then(|| Rational::new(rn, rd))
}

/// Rational eigenlines of a 2x2 matrix, from the quadratic formula; `None` if it is scalar.
fn eigenlines_2x2(m: &RatMatrix) -> Option<Vec<Vec<Rational>>> {
    let (a, b, c, d) = (m[(0, 0)].clone(), m[(0, 1)].clone(), m[(1, 0)].clone(), m[(1, 1)].clone());
    if b.is_zero() && c.is_zero() && a == d {
        return None;
    }
    let tr = &a + &d;
    let det = &a * &d - &b * &c;
    let disc = &tr * &tr - rat(4) * &det;
    let Some(r) = is_rational_square(&disc) else {
        return Some(Vec::new());
    };
    let mut lines = Vec::new();
    for sign in [1, -1] {
        let lambda = (&tr + &r * rat(sign)) / rat(2);
        // (m - lambda) v = 0
        let v = if !b.is_zero() {
            vec![b.clone(), &lambda - &a]
        } else if !c.is_zero() {
            vec![&lambda - &d, c.clone()]
        } else if a == lambda {
            vec![rat(1), rat(0)]
        } else {
            vec![rat(0), rat(1)]
        };
        let v = normalize(v);
        if !lines.contains(&v) {
            lines.push(v);
        }
    }
    Some(lines)
}

fn normalize(v: Vec<Rational>) -> Vec<Rational> {
    let lead = v.iter().find(|x| !x.is_zero()).unwrap().clone();
    v.into_iter().map(|x| x / &lead).collect()
}

/// Lines of `Q^2` invariant under all matrices; `None` means every line is invariant.
pub fn invariant_lines_2x2(mats: &[RatMatrix]) -> Option<Vec<Vec<Rational>>> {
    let mut candidates: Option<Vec<Vec<Rational>>> = None;
    for m in mats {
        if let Some(lines) = eigenlines_2x2(m) {
            candidates = Some(match candidates {
                None => lines,
                Some(c) => c.into_iter().filter(|l| lines.contains(l)).collect(),
            });
        }
    }
    candidates
}

// ---------- certificate mutations ----------

fn bump(x: &mut String) {
    let v = solenoid_gap::linalg::rational::parse_rational(x).unwrap() + rat(1);
    *x = solenoid_gap::linalg::rational::format_rational(&v);
}

/// Adds 1 to the last coordinate of the first basis vector of every stored submodule.
///
/// Not applicable when every generator acts by a scalar, since then every subspace is invariant.
pub fn perturb_basis(cert: &Certificate) -> Option<Certificate> {
    let (_, gens) = cert.replay_data.to_parts().ok()?;
    if gens.iter().all(|g| g.matrix == RatMatrix::identity(g.matrix.rows()).scale(&g.matrix[(0, 0)])) {
        return None;
    }
    let mut c = cert.clone();
    let mut hit = false;
    let mut touch = |basis: &mut Vec<Vec<String>>| {
        if let Some(last) = basis.first_mut().and_then(|v| v.last_mut()) {
            bump(last);
            hit = true;
        }
    };
    match &mut c.witness {
        Some(WitnessJson::InvariantSubspace { submodule, .. }) | Some(WitnessJson::FiniteOrbit { submodule, .. }) => {
            touch(&mut submodule.basis)
        }
        None => {}
    }
    for e in c.evidence.iter_mut().flatten() {
        match e {
            EvidenceJson::NonabelianImage { submodule, .. } | EvidenceJson::InfiniteImage { submodule, .. } => {
                touch(&mut submodule.basis)
            }
        }
    }
    hit.then_some(c)
}

/// Removes the last orbit element together with its phases.
pub fn delete_orbit_element(cert: &Certificate) -> Option<Certificate> {
    let mut c = cert.clone();
    match &mut c.witness {
        Some(WitnessJson::FiniteOrbit { orbit, phases, .. }) => {
            orbit.pop()?;
            for row in phases.iter_mut() {
                row.pop();
            }
            Some(c)
        }
        _ => None,
    }
}

/// Replaces the first stored Lie basis element by the zero matrix.
pub fn zero_lie_element(cert: &Certificate) -> Option<Certificate> {
    let mut c = cert.clone();
    let zero = |m: &mut Vec<Vec<String>>| {
        for row in m.iter_mut() {
            for x in row.iter_mut() {
                *x = "0".into();
            }
        }
    };
    let mut hit = false;
    if let Some(WitnessJson::InvariantSubspace { lie, .. }) = &mut c.witness {
        if let Some(m) = lie.basis.first_mut() {
            zero(m);
            hit = true;
        }
    }
    for e in c.evidence.iter_mut().flatten() {
        if let EvidenceJson::NonabelianImage { lie, .. } = e {
            if let Some(m) = lie.basis.first_mut() {
                zero(m);
                hit = true;
            }
        }
    }
    hit.then_some(c)
}
