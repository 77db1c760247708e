//! Meataxe-style submodule search over the rationals.

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::ModuleError;
use crate::linalg::factor::{factor_poly, is_irreducible as poly_irreducible};
use crate::linalg::matrix::{RatMatrix, RatVector};
use crate::linalg::poly::{minimal_polynomial, RatPoly};
use crate::linalg::rational::{parse_rational, rat, Rational};

use super::{algebra_basis, hom_space_dims, in_algebra, quotient_action, restrict, spin_unchecked};
use super::{ActionOnSubmodule, Submodule};

/// An algebra element `theta` and an irreducible factor `p` of its minimal polynomial with
/// `dim ker p(theta) = deg p`, such that kernel vectors spin to the whole space on both sides.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NortonCertificate {
    pub theta: RatMatrix,
    pub factor: RatPoly,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NortonJson {
    pub theta: Vec<Vec<String>>,
    pub factor: Vec<String>,
}

impl NortonCertificate {
    pub fn to_json(&self) -> NortonJson {
        NortonJson {
            theta: self.theta.to_strings(),
            factor: self.factor.to_strings(),
        }
    }

    pub fn from_json(j: &NortonJson) -> Option<Self> {
        let n = j.theta.len();
        let mut data = Vec::with_capacity(n * n);
        for row in &j.theta {
            if row.len() != n {
                return None;
            }
            for s in row {
                data.push(parse_rational(s).ok()?);
            }
        }
        let coeffs: Option<Vec<Rational>> = j.factor.iter().map(|s| parse_rational(s).ok()).collect();
        Some(NortonCertificate {
            theta: RatMatrix::from_vec(n, n, data),
            factor: RatPoly::new(coeffs?),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Irreducibility {
    Irreducible(NortonCertificate),
    Reducible(Submodule),
}

impl Irreducibility {
    pub fn is_irreducible(&self) -> bool {
        matches!(self, Irreducibility::Irreducible(_))
    }
}

fn probe_budget(d: usize) -> usize {
    48 + 16 * d
}

fn transposes(gens: &[RatMatrix]) -> Vec<RatMatrix> {
    gens.iter().map(|g| g.transpose()).collect()
}

fn random_combination(basis: &[RatMatrix], d: usize, rng: &mut ChaCha8Rng) -> RatMatrix {
    loop {
        let mut x = RatMatrix::zeros(d, d);
        for b in basis {
            let c: i64 = rng.gen_range(-3..=3);
            if c != 0 {
                x = &x + &b.scale(&rat(c));
            }
        }
        if !x.is_zero() {
            return x;
        }
    }
}

fn is_scalar(g: &RatMatrix) -> bool {
    let c = g[(0, 0)].clone();
    (0..g.rows()).all(|i| (0..g.cols()).all(|j| if i == j { g[(i, j)] == c } else { g[(i, j)].is_zero() }))
}

/// Radical of the trace form on the algebra; nonzero iff the module is not semisimple.
fn trace_radical(basis: &[RatMatrix]) -> Vec<RatMatrix> {
    let r = basis.len();
    let mut gram = RatMatrix::zeros(r, r);
    for i in 0..r {
        for j in i..r {
            let t = (&basis[i] * &basis[j]).trace();
            gram[(i, j)] = t.clone();
            gram[(j, i)] = t;
        }
    }
    gram.kernel()
        .into_iter()
        .map(|x| {
            let d = basis[0].rows();
            let mut m = RatMatrix::zeros(d, d);
            for (c, b) in x.iter().zip(basis) {
                if !c.is_zero() {
                    m = &m + &b.scale(c);
                }
            }
            m
        })
        .collect()
}

/// One splitting step: a proper nonzero invariant subspace, or a Norton certificate.
pub fn find_submodule(gens: &[RatMatrix], d: usize, seed: u64) -> Result<Irreducibility, ModuleError> {
    assert!(d > 0, "zero-dimensional module");
    if d == 1 {
        return Ok(Irreducibility::Irreducible(NortonCertificate {
            theta: RatMatrix::zeros(1, 1),
            factor: RatPoly::x(),
        }));
    }
    if gens.iter().all(is_scalar) {
        let mut e1 = vec![Rational::zero(); d];
        e1[0] = rat(1);
        return Ok(Irreducibility::Reducible(Submodule::span(d, &[e1])));
    }
    let alg = algebra_basis(gens, d);
    let radical = trace_radical(&alg);
    if !radical.is_empty() {
        let cols: Vec<RatVector> = radical.iter().flat_map(|m| m.column_vectors()).collect();
        return Ok(Irreducibility::Reducible(Submodule::span(d, &cols)));
    }
    let gens_t = transposes(gens);
    let commutant = hom_space_dims(gens, gens, d, d);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for attempt in 0..probe_budget(d) {
        let theta = if attempt < alg.len().min(8) {
            alg[attempt].clone()
        } else {
            random_combination(&alg, d, &mut rng)
        };
        let mut factors = factor_poly(&minimal_polynomial(&theta));
        factors.sort_by_key(|(p, _)| p.deg());
        for (p, _) in factors {
            let n = p.eval_matrix(&theta);
            let k = n.kernel();
            let s = spin_unchecked(&k[..1], gens, d);
            if !s.is_full() {
                return Ok(Irreducibility::Reducible(s));
            }
            let kt = n.transpose().kernel();
            let st = spin_unchecked(&kt[..1], &gens_t, d);
            if !st.is_full() {
                return Ok(Irreducibility::Reducible(st.annihilator()));
            }
            if k.len() == p.deg() {
                return Ok(Irreducibility::Irreducible(NortonCertificate { theta, factor: p }));
            }
        }
        if commutant.len() > 1 {
            let x = random_combination(&commutant, d, &mut rng);
            let factors = factor_poly(&minimal_polynomial(&x));
            if factors.len() > 1 || factors[0].1 > 1 {
                // kernels of proper factors of an endomorphism are submodules
                let k = factors[0].0.eval_matrix(&x).kernel();
                return Ok(Irreducibility::Reducible(Submodule::span(d, &k)));
            }
        }
    }
    Err(ModuleError::ProbeExhausted { dim: d })
}

/// Irreducibility with a Norton certificate or a proper invariant subspace.
pub fn is_irreducible(gens: &[RatMatrix], d: usize, seed: u64) -> Result<Irreducibility, ModuleError> {
    find_submodule(gens, d, seed)
}

/// Replays a Norton certificate against the generators.
pub fn verify_norton(gens: &[RatMatrix], d: usize, cert: &NortonCertificate) -> bool {
    if d == 0 || cert.theta.rows() != d || cert.theta.cols() != d || cert.factor.deg() == 0 {
        return false;
    }
    if gens.iter().any(|g| g.rows() != d || g.cols() != d) {
        return false;
    }
    if !poly_irreducible(&cert.factor) || !in_algebra(&algebra_basis(gens, d), &cert.theta) {
        return false;
    }
    let n = cert.factor.eval_matrix(&cert.theta);
    let k = n.kernel();
    if k.len() != cert.factor.deg() {
        return false;
    }
    let kt = n.transpose().kernel();
    spin_unchecked(&k[..1], gens, d).is_full() && spin_unchecked(&kt[..1], &transposes(gens), d).is_full()
}

/// Actions on the composition factors, in order along one composition series.
pub fn composition_factors(gens: &[RatMatrix], d: usize, seed: u64) -> Result<Vec<Vec<RatMatrix>>, ModuleError> {
    if d == 0 {
        return Ok(Vec::new());
    }
    match find_submodule(gens, d, seed)? {
        Irreducibility::Irreducible(_) => Ok(vec![gens.to_vec()]),
        Irreducibility::Reducible(w) => {
            let sub = restrict(gens, &w)?;
            let quo = quotient_action(gens, &w);
            let mut out = composition_factors(&sub.restricted_gens, w.dim(), seed.wrapping_add(1))?;
            out.extend(composition_factors(&quo, d - w.dim(), seed.wrapping_add(2))?);
            Ok(out)
        }
    }
}

/// One simple submodule per isomorphism type occurring in the socle, in canonical order.
pub fn simple_submodule_reps(gens: &[RatMatrix], d: usize, seed: u64) -> Result<Vec<ActionOnSubmodule>, ModuleError> {
    let factors = composition_factors(gens, d, seed)?;
    let mut types: Vec<(usize, Vec<RatMatrix>)> = Vec::new();
    for f in factors {
        let t = f.first().map(|g| g.rows()).unwrap_or_else(|| 1);
        let t = if gens.is_empty() { 1 } else { t };
        let seen = types
            .iter()
            .any(|(u, g)| *u == t && !hom_space_dims(&f, g, t, *u).is_empty());
        if !seen {
            types.push((t, f));
        }
    }
    let mut reps: Vec<ActionOnSubmodule> = Vec::new();
    for (t, tg) in &types {
        let homs = hom_space_dims(tg, gens, *t, d);
        let best = homs
            .iter()
            .map(|x| Submodule::span(d, &x.column_vectors()))
            .min_by_key(|s| s.canonical_key());
        if let Some(w) = best {
            reps.push(restrict(gens, &w)?);
        }
    }
    reps.sort_by_key(|a| a.submodule.canonical_key());
    Ok(reps)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s() -> RatMatrix {
        RatMatrix::from_i64(&[&[0, -1], &[1, 0]])
    }
    fn t() -> RatMatrix {
        RatMatrix::from_i64(&[&[1, 1], &[0, 1]])
    }

    #[test]
    fn irreducibility_examples() {
        match is_irreducible(&[s(), t()], 2, 0).unwrap() {
            Irreducibility::Irreducible(c) => assert!(verify_norton(&[s(), t()], 2, &c)),
            r => panic!("expected irreducible, got {r:?}"),
        }
        let e1 = Submodule::span(2, &[vec![rat(1), rat(0)]]);
        assert_eq!(
            is_irreducible(&[t()], 2, 0).unwrap(),
            Irreducibility::Reducible(e1.clone())
        );
        assert_eq!(
            is_irreducible(&[RatMatrix::identity(2)], 2, 0).unwrap(),
            Irreducibility::Reducible(e1)
        );
        // a rotation alone is irreducible over Q
        assert!(is_irreducible(&[s()], 2, 0).unwrap().is_irreducible());
    }

    #[test]
    fn socle_examples() {
        let reps = simple_submodule_reps(&[t()], 2, 0).unwrap();
        assert_eq!(reps.len(), 1);
        assert_eq!(reps[0].submodule.basis(), &[vec![rat(1), rat(0)]]);
        assert_eq!(reps[0].restricted_gens, vec![RatMatrix::from_i64(&[&[1]])]);

        let reps = simple_submodule_reps(&[RatMatrix::identity(2)], 2, 0).unwrap();
        assert_eq!(reps.len(), 1);
        assert_eq!(reps[0].submodule.basis(), &[vec![rat(1), rat(0)]]);

        let reps = simple_submodule_reps(&[s().transpose(), t().transpose()], 2, 0).unwrap();
        assert_eq!(reps.len(), 1);
        assert!(reps[0].submodule.is_full());

        let reps = simple_submodule_reps(&[RatMatrix::from_i64(&[&[2, 0], &[0, 3]])], 2, 0).unwrap();
        assert_eq!(reps.len(), 2);
    }

    #[test]
    fn isotypic_blocks_split() {
        // rotation acting diagonally on Q^2 + Q^2: socle is isotypic of multiplicity two
        let r = RatMatrix::from_i64(&[&[0, -1, 0, 0], &[1, 0, 0, 0], &[0, 0, 0, -1], &[0, 0, 1, 0]]);
        let f = composition_factors(&[r.clone()], 4, 0).unwrap();
        assert_eq!(f.len(), 2);
        let reps = simple_submodule_reps(&[r], 4, 0).unwrap();
        assert_eq!(reps.len(), 1);
        assert_eq!(reps[0].submodule.dim(), 2);
    }
}
