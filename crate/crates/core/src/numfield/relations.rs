//! Multiplicative relation lattices among eigenvalues.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::NumberFieldError;
use crate::linalg::lattice::{hnf, integer_kernel, IntVector};
use crate::linalg::rational::Rational;

use super::algebraic::{root_of_unity_order, AlgebraicNumber};
use super::integers::{coprime_base, factor_integer, legendre, sqrt_mod_prime_power, valuation};
use super::quadratic::QuadElem;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationLattice {
    pub n: usize,
    pub basis: Vec<IntVector>,
    pub complete: bool,
}

impl RelationLattice {
    pub fn contains(&self, v: &[BigInt]) -> bool {
        // membership via the echelon structure of the HNF basis
        let mut v: Vec<BigInt> = v.to_vec();
        for row in &self.basis {
            let Some(p) = row.iter().position(|x| !x.is_zero()) else {
                continue;
            };
            let (q, r) = v[p].div_rem(&row[p]);
            if !r.is_zero() {
                return false;
            }
            for (x, y) in v.iter_mut().zip(row) {
                *x -= &q * y;
            }
        }
        v.iter().all(|x| x.is_zero())
    }
}

/// Lattice of integer vectors `e` with `prod lambda_i^e_i = 1`.
pub fn mult_relation_lattice(lambdas: &[AlgebraicNumber]) -> Result<RelationLattice, NumberFieldError> {
    let n = lambdas.len();
    if lambdas.iter().any(|l| l.is_zero()) {
        return Err(NumberFieldError::ZeroEigenvalue);
    }
    if let Some(q) = common_quadratic(lambdas) {
        return Ok(RelationLattice {
            n,
            basis: quadratic_lattice(&q),
            complete: true,
        });
    }

    // Incomplete tier: exact relations inside each quadratic subfield, plus torsion.
    let mut gens: Vec<IntVector> = Vec::new();
    let mut fields: BTreeMap<BigInt, Vec<usize>> = BTreeMap::new();
    let rational_idx: Vec<usize> = (0..n).filter(|&i| lambdas[i].degree() == 1).collect();
    for (i, l) in lambdas.iter().enumerate() {
        if l.degree() == 2 {
            let q = l.as_quadratic().expect("quadratic root");
            fields.entry(q.d.clone()).or_default().push(i);
        }
        if let Some(m) = root_of_unity_order(l) {
            let mut v = vec![BigInt::zero(); n];
            v[i] = BigInt::from(m);
            gens.push(v);
        }
    }
    let mut groups: Vec<Vec<usize>> = fields
        .into_values()
        .map(|mut idx| {
            idx.extend(rational_idx.iter().copied());
            idx
        })
        .collect();
    groups.push(rational_idx.clone());
    for idx in groups {
        let sub: Vec<AlgebraicNumber> = idx.iter().map(|&i| lambdas[i].clone()).collect();
        let q = common_quadratic(&sub).expect("subfield group");
        for rel in quadratic_lattice(&q) {
            let mut v = vec![BigInt::zero(); n];
            for (k, &i) in idx.iter().enumerate() {
                v[i] = rel[k].clone();
            }
            gens.push(v);
        }
    }
    Ok(RelationLattice {
        n,
        basis: hnf(&gens, n),
        complete: false,
    })
}

/// Representations of all inputs in one field `Q(sqrt D)` (or `Q`), if possible.
pub(crate) fn common_quadratic(lambdas: &[AlgebraicNumber]) -> Option<Vec<QuadElem>> {
    let mut d: Option<BigInt> = None;
    let mut out = Vec::with_capacity(lambdas.len());
    for l in lambdas {
        let q = l.as_quadratic()?;
        if !q.is_rational() {
            match &d {
                None => d = Some(q.d.clone()),
                Some(d0) if *d0 == q.d => {}
                Some(_) => return None,
            }
        }
        out.push(q);
    }
    let d = d.unwrap_or_else(BigInt::one);
    Some(out.into_iter().map(|q| QuadElem::new(q.a, q.b, d.clone())).collect())
}

/// Exact check that `prod lambda_i^e_i = 1` when all inputs share a quadratic field.
pub fn verify_relation(lambdas: &[AlgebraicNumber], e: &[BigInt]) -> Option<bool> {
    let q = common_quadratic(lambdas)?;
    Some(eval_product(&q, e).is_one())
}

fn eval_product(q: &[QuadElem], e: &[BigInt]) -> QuadElem {
    let d = q.first().map(|x| x.d.clone()).unwrap_or_else(BigInt::one);
    let mut acc = QuadElem::one(d);
    for (x, k) in q.iter().zip(e) {
        if !k.is_zero() {
            acc = &acc * &x.pow_big(k);
        }
    }
    acc
}

/// `(a + b sqrt D) / c` with integers `a, b` and `c > 0`.
fn integral_parts(x: &QuadElem) -> (BigInt, BigInt, BigInt) {
    let c = x.a.denom().lcm(x.b.denom());
    let a = (&x.a * Rational::from_integer(c.clone())).to_integer();
    let b = (&x.b * Rational::from_integer(c.clone())).to_integer();
    (a, b, c)
}

enum Splitting {
    Split,
    Inert,
    Ramified,
}

fn splitting(p: &BigInt, d: &BigInt) -> Splitting {
    let two = BigInt::from(2);
    if *p == two {
        match d.mod_floor(&BigInt::from(8)).to_u32().unwrap() {
            1 => Splitting::Split,
            5 => Splitting::Inert,
            _ => Splitting::Ramified,
        }
    } else if (d % p).is_zero() {
        Splitting::Ramified
    } else if legendre(d, p) == 1 {
        Splitting::Split
    } else {
        Splitting::Inert
    }
}

/// Valuation rows (one per prime ideal) for elements of `Q(sqrt D)`.
fn valuation_rows(q: &[QuadElem], d: &BigInt) -> Vec<IntVector> {
    let parts: Vec<_> = q.iter().map(integral_parts).collect();
    let norms: Vec<BigInt> = parts.iter().map(|(a, b, _)| a * a - d * b * b).collect();
    let mut primes: Vec<BigInt> = Vec::new();
    for ((_, _, c), nm) in parts.iter().zip(&norms) {
        for v in [c, nm] {
            if !v.is_zero() && !v.abs().is_one() {
                primes.extend(factor_integer(v).into_iter().map(|(p, _)| p));
            }
        }
    }
    primes.sort();
    primes.dedup();
    let vp = |x: &BigInt, p: &BigInt| -> i64 {
        if x.is_zero() {
            panic!("zero has no valuation")
        }
        valuation(x, p) as i64
    };
    let mut rows = Vec::new();
    for p in &primes {
        match splitting(p, d) {
            Splitting::Inert => rows.push(
                parts
                    .iter()
                    .zip(&norms)
                    .map(|((_, _, c), nm)| BigInt::from((vp(nm, p) - 2 * vp(c, p)) / 2))
                    .collect(),
            ),
            Splitting::Ramified => rows.push(
                parts
                    .iter()
                    .zip(&norms)
                    .map(|((_, _, c), nm)| BigInt::from(vp(nm, p) - 2 * vp(c, p)))
                    .collect(),
            ),
            Splitting::Split => {
                let k = norms.iter().map(|nm| vp(nm, p)).max().unwrap_or(0) as u32 + 3;
                let r = sqrt_mod_prime_power(d, p, k);
                let m = p.pow(k);
                for sign in [1i32, -1] {
                    rows.push(
                        parts
                            .iter()
                            .map(|(a, b, c)| {
                                let img = (a + b * &r * BigInt::from(sign)).mod_floor(&m);
                                // img is nonzero mod p^k because its valuation is bounded by v_p(norm)
                                BigInt::from(vp(&img, p).min(k as i64) - vp(c, p))
                            })
                            .collect(),
                    );
                }
            }
        }
    }
    rows
}

fn rational_lattice(q: &[Rational]) -> Vec<IntVector> {
    let n = q.len();
    let mut values = Vec::new();
    for x in q {
        values.push(x.numer().clone());
        values.push(x.denom().clone());
    }
    let base = coprime_base(&values);
    let rows: Vec<IntVector> = base
        .iter()
        .map(|b| {
            q.iter()
                .map(|x| BigInt::from(valuation(x.numer(), b) as i64 - valuation(x.denom(), b) as i64))
                .collect()
        })
        .collect();
    let sign: IntVector = q
        .iter()
        .map(|x| if x.is_negative() { BigInt::one() } else { BigInt::zero() })
        .collect();
    integer_kernel(&rows, &[(sign, BigInt::from(2))], n)
}

fn quadratic_lattice(q: &[QuadElem]) -> Vec<IntVector> {
    let n = q.len();
    if n == 0 {
        return Vec::new();
    }
    let d = q[0].d.clone();
    if d.is_one() {
        let r: Vec<Rational> = q.iter().map(|x| x.a.clone()).collect();
        return rational_lattice(&r);
    }
    let rows = valuation_rows(q, &d);
    // unit exponent vectors
    let units_basis = integer_kernel(&rows, &[], n);
    let r = units_basis.len();
    if r == 0 {
        return Vec::new();
    }
    let units: Vec<QuadElem> = units_basis.iter().map(|k| eval_product(q, k)).collect();
    let (rows_m, congr_m) = if d.is_negative() {
        torsion_constraints(&units, &d)
    } else {
        real_unit_constraints(&units)
    };
    let m = integer_kernel(&rows_m, &congr_m, r);
    let gens: Vec<IntVector> = m
        .iter()
        .map(|mv| {
            let mut v = vec![BigInt::zero(); n];
            for (mj, kj) in mv.iter().zip(&units_basis) {
                for (x, y) in v.iter_mut().zip(kj) {
                    *x += mj * y;
                }
            }
            v
        })
        .collect();
    hnf(&gens, n)
}

/// Imaginary fields: every unit is a root of unity in `mu_w`; relations are a congruence on discrete logs.
fn torsion_constraints(units: &[QuadElem], d: &BigInt) -> (Vec<IntVector>, Vec<(IntVector, BigInt)>) {
    let half = Rational::new(BigInt::one(), BigInt::from(2));
    let (w, zeta) = if *d == BigInt::from(-1) {
        (4, QuadElem::new(Rational::zero(), Rational::one(), d.clone()))
    } else if *d == BigInt::from(-3) {
        (6, QuadElem::new(half.clone(), half, d.clone()))
    } else {
        (2, QuadElem::rational(-Rational::one(), d.clone()))
    };
    let logs: IntVector = units
        .iter()
        .map(|u| {
            let mut p = QuadElem::one(d.clone());
            for t in 0..w {
                if p == *u {
                    return BigInt::from(t);
                }
                p = &p * &zeta;
            }
            unreachable!("unit of an imaginary quadratic field outside mu_w")
        })
        .collect();
    (Vec::new(), vec![(logs, BigInt::from(w))])
}

/// Real fields: units are `+-eps^n`; exponents come from exactly verified log ratios.
fn real_unit_constraints(units: &[QuadElem]) -> (Vec<IntVector>, Vec<(IntVector, BigInt)>) {
    let r = units.len();
    let signs: IntVector = units
        .iter()
        .map(|u| if u.real_sign() < 0 { BigInt::one() } else { BigInt::zero() })
        .collect();
    let logs: Vec<f64> = units.iter().map(|u| u.ln_abs_real()).collect();
    let nontrivial = |u: &QuadElem| !(u.is_one() || (-u).is_one());
    let reference = (0..r)
        .filter(|&j| nontrivial(&units[j]))
        .min_by(|&i, &j| logs[i].abs().partial_cmp(&logs[j].abs()).unwrap());
    let mut rows = Vec::new();
    if let Some(rf) = reference {
        // exponent of each unit relative to the reference, as a verified fraction p/q
        let mut fracs: Vec<Option<(BigInt, BigInt)>> = vec![None; r];
        for j in 0..r {
            if !nontrivial(&units[j]) {
                fracs[j] = Some((BigInt::zero(), BigInt::one()));
                continue;
            }
            fracs[j] = verified_ratio(&units[j], &units[rf], logs[j] / logs[rf]);
        }
        let l = fracs
            .iter()
            .flatten()
            .fold(BigInt::one(), |acc, (_, q)| acc.lcm(q));
        let row: IntVector = fracs
            .iter()
            .map(|f| match f {
                Some((p, q)) => p * (&l / q),
                None => BigInt::zero(),
            })
            .collect();
        rows.push(row);
        for (j, f) in fracs.iter().enumerate() {
            if f.is_none() {
                // unverified: forbid this direction entirely (sound sublattice)
                let mut e = vec![BigInt::zero(); r];
                e[j] = BigInt::one();
                rows.push(e);
            }
        }
    }
    (rows, vec![(signs, BigInt::from(2))])
}

/// Finds `p/q` with `u^q = +-v^p` by continued fractions of the float ratio, verified exactly.
fn verified_ratio(u: &QuadElem, v: &QuadElem, x: f64) -> Option<(BigInt, BigInt)> {
    let (mut h0, mut h1) = (0i64, 1i64);
    let (mut k0, mut k1) = (1i64, 0i64);
    let mut y = x;
    for _ in 0..64 {
        let a = y.floor();
        if a.abs() > 1e15 {
            break;
        }
        let a = a as i64;
        let (h2, k2) = (a.checked_mul(h1)?.checked_add(h0)?, a.checked_mul(k1)?.checked_add(k0)?);
        if k2 > 1 << 20 {
            break;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let lhs = u.pow(k1);
        let rhs = v.pow(h1);
        if lhs == rhs || lhs == -&rhs {
            return Some((BigInt::from(h1), BigInt::from(k1)));
        }
        let f = y - a as f64;
        if f.abs() < 1e-300 {
            break;
        }
        y = 1.0 / f;
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::poly::RatPoly;
    use crate::linalg::rational::{rat, ratio};

    fn q(x: Rational) -> AlgebraicNumber {
        AlgebraicNumber::from_rational(&x)
    }

    fn iv(v: &[i64]) -> IntVector {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn rational_examples() {
        let l = mult_relation_lattice(&[q(rat(2)), q(rat(4))]).unwrap();
        assert!(l.complete);
        assert_eq!(l.basis, vec![iv(&[2, -1])]);
        let l = mult_relation_lattice(&[q(rat(1))]).unwrap();
        assert_eq!(l.basis, vec![iv(&[1])]);
        let l = mult_relation_lattice(&[q(rat(-1)), q(ratio(3, 2)), q(ratio(2, 3))]).unwrap();
        assert_eq!(l.basis, vec![iv(&[2, 0, 0]), iv(&[0, 1, 1])]);
        assert!(mult_relation_lattice(&[q(rat(0))]).is_err());
    }

    #[test]
    fn golden_unit_and_inverse() {
        let roots = AlgebraicNumber::roots_of(&RatPoly::from_i64(&[1, -3, 1])).unwrap();
        let big = roots.iter().find(|r| r.approx().re > 1.0).unwrap().clone();
        let small = roots.iter().find(|r| r.approx().re < 1.0).unwrap().clone();
        let l = mult_relation_lattice(&[big.clone(), small.clone()]).unwrap();
        assert!(l.complete);
        assert_eq!(l.basis, vec![iv(&[1, 1])]);
        // phi^2 = golden unit squared relation: ((1+sqrt5)/2)^2 = (3+sqrt5)/2
        let phi = AlgebraicNumber::roots_of(&RatPoly::from_i64(&[-1, -1, 1]))
            .unwrap()
            .into_iter()
            .find(|r| r.approx().re > 0.0)
            .unwrap();
        let l = mult_relation_lattice(&[phi, big, q(rat(-1))]).unwrap();
        assert_eq!(l.basis, vec![iv(&[2, -1, 0]), iv(&[0, 0, 2])]);
    }

    #[test]
    fn gaussian_relations() {
        // (1+i)^2 = 2i, i^4 = 1
        let i = AlgebraicNumber::roots_of(&RatPoly::from_i64(&[1, 0, 1])).unwrap()[0].clone();
        let one_plus_i = AlgebraicNumber::roots_of(&RatPoly::from_i64(&[2, -2, 1])).unwrap()[0].clone();
        let lams = [one_plus_i, i, q(rat(2))];
        let l = mult_relation_lattice(&lams).unwrap();
        assert!(l.complete);
        for b in &l.basis {
            assert_eq!(verify_relation(&lams, b), Some(true));
        }
        assert_eq!(l.basis.len(), 2);
        // (1+i)^4 = -4, so (4, 2, -2) must be in the lattice
        assert!(l.contains(&iv(&[4, 2, -2])));
    }

    #[test]
    fn mixed_fields_are_incomplete() {
        let s2 = AlgebraicNumber::roots_of(&RatPoly::from_i64(&[-2, 0, 1])).unwrap();
        let s3 = AlgebraicNumber::roots_of(&RatPoly::from_i64(&[-3, 0, 1])).unwrap();
        let l = mult_relation_lattice(&[s2[0].clone(), s3[0].clone(), q(rat(2))]).unwrap();
        assert!(!l.complete);
        assert!(l.contains(&iv(&[2, 0, -1])));
        assert!(!l.contains(&iv(&[0, 2, -1])));
    }
}
