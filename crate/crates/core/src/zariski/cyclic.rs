//! Lie algebra of the Zariski closure of a cyclic group.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::ZariskiError;
use crate::linalg::factor::factor_poly;
use crate::linalg::matrix::{EchelonBasis, RatMatrix, RatVector};
use crate::linalg::poly::{minimal_polynomial, RatPoly};
use crate::linalg::rational::{rat, Rational};
use crate::numfield::algebraic::{root_of_unity_order, AlgebraicNumber};
use crate::numfield::quadratic::QuadElem;
use crate::numfield::relations::{common_quadratic, mult_relation_lattice};

/// Multiplicative Jordan decomposition `g = s u` with `s` semisimple, `u` unipotent, `su = us`.
pub fn jordan_decomposition(g: &RatMatrix) -> Result<(RatMatrix, RatMatrix), ZariskiError> {
    if g.determinant().is_zero() {
        return Err(ZariskiError::Singular(0));
    }
    let m = minimal_polynomial(g);
    let r = m.div_rem(&m.gcd(&m.derivative())).0;
    let dr = r.derivative();
    let mut s = g.clone();
    loop {
        let rs = r.eval_matrix(&s);
        if rs.is_zero() {
            break;
        }
        let inv = dr.eval_matrix(&s).inverse().expect("r'(s) is invertible");
        s = &s - &(&rs * &inv);
    }
    let u = &s.inverse().expect("semisimple part of an invertible matrix") * g;
    Ok((s, u))
}

/// `log u` for unipotent `u`, a terminating series.
pub fn log_unipotent(u: &RatMatrix) -> RatMatrix {
    let d = u.rows();
    let n = u - &RatMatrix::identity(d);
    let mut acc = RatMatrix::zeros(d, d);
    let mut p = n.clone();
    for k in 1..=d {
        if p.is_zero() {
            break;
        }
        let c = Rational::new(BigInt::from(if k % 2 == 1 { 1 } else { -1 }), BigInt::from(k));
        acc = &acc + &p.scale(&c);
        p = &p * &n;
    }
    acc
}

fn companion(f: &RatPoly) -> RatMatrix {
    let n = f.deg();
    let mut c = RatMatrix::zeros(n, n);
    for i in 1..n {
        c[(i, i - 1)] = rat(1);
    }
    let f = f.monic();
    for i in 0..n {
        c[(i, n - 1)] = -f.coeff(i);
    }
    c
}

fn x_pow_mod(i: usize, f: &RatPoly) -> RatPoly {
    let mut c = vec![Rational::zero(); i + 1];
    c[i] = Rational::one();
    RatPoly::new(c).rem(f)
}

/// Rational linear constraints on `c` (coordinates of `p(s) = sum c_i s^i`) cut out by a relation `e`
/// among eigenvalues that all lie in one field `Q(sqrt D)`.
fn quadratic_rows(roots: &[QuadElem], e: &[BigInt], k: usize) -> [RatVector; 2] {
    let mut alpha = vec![Rational::zero(); k];
    let mut beta = vec![Rational::zero(); k];
    for (sigma, ei) in roots.iter().zip(e) {
        if ei.is_zero() {
            continue;
        }
        let ei = Rational::from_integer(ei.clone());
        let mut p = QuadElem::one(sigma.d.clone());
        for i in 0..k {
            alpha[i] += &p.a * &ei;
            beta[i] += &p.b * &ei;
            p = &p * sigma;
        }
    }
    [alpha, beta]
}

/// Rational points of the Lie algebra of the Zariski closure of `<s>` for semisimple `s`.
/// The flag is false when only a sublattice of the eigenvalue relations was available, in
/// which case the result contains the true algebra.
pub fn torus_lie(s: &RatMatrix) -> (Vec<RatMatrix>, bool) {
    let r = minimal_polynomial(s);
    let k = r.deg();
    let blocks: Vec<RatPoly> = factor_poly(&r).into_iter().map(|(f, _)| f).collect();
    let mut roots: Vec<AlgebraicNumber> = Vec::new();
    let mut block_of: Vec<usize> = Vec::new();
    for (j, f) in blocks.iter().enumerate() {
        let rs = AlgebraicNumber::roots_of(f).expect("irreducible factor");
        block_of.extend(std::iter::repeat(j).take(rs.len()));
        roots.extend(rs);
    }
    let mut rows: Vec<RatVector> = Vec::new();
    let complete;
    if let Some(q) = common_quadratic(&roots) {
        let lattice = mult_relation_lattice(&roots).expect("nonzero eigenvalues");
        complete = lattice.complete;
        for e in &lattice.basis {
            rows.extend(quadratic_rows(&q, e, k));
        }
    } else {
        // For one irreducible cubic block the permutation module of the roots is the trivial
        // module plus an irreducible one, so the relation space is spanned by what the norm,
        // Kummer and torsion constraints below detect.
        complete = blocks.len() == 1 && blocks[0].deg() == 3;
        // relations inside each quadratic subfield, together with the rational eigenvalues
        let mut fields: BTreeMap<BigInt, Vec<usize>> = BTreeMap::new();
        let rational: Vec<usize> = (0..roots.len()).filter(|&i| roots[i].degree() == 1).collect();
        for (i, l) in roots.iter().enumerate() {
            if l.degree() == 2 {
                fields.entry(l.as_quadratic().unwrap().d).or_default().push(i);
            }
        }
        let mut groups: Vec<Vec<usize>> = fields
            .into_values()
            .map(|mut v| {
                v.extend(rational.iter().copied());
                v
            })
            .collect();
        groups.push(rational.clone());
        for idx in groups {
            let sub: Vec<AlgebraicNumber> = idx.iter().map(|&i| roots[i].clone()).collect();
            let q = common_quadratic(&sub).expect("single quadratic field");
            let lattice = mult_relation_lattice(&sub).expect("nonzero eigenvalues");
            for e in &lattice.basis {
                rows.extend(quadratic_rows(&q, e, k));
            }
        }
        let x_mod: Vec<Vec<RatPoly>> = blocks.iter().map(|f| (0..k).map(|i| x_pow_mod(i, f)).collect()).collect();
        for (j, f) in blocks.iter().enumerate() {
            let first = block_of.iter().position(|&b| b == j).unwrap();
            let n = f.deg();
            let torsion = root_of_unity_order(&roots[first]).is_some();
            // sigma^m rational for every root: all roots of the block share one eigenvalue coordinate
            let kummer = (1..=64).any(|m| x_pow_mod(m, f).deg() == 0);
            let start = if torsion {
                0
            } else if kummer {
                1
            } else {
                n
            };
            for t in start..n {
                rows.push((0..k).map(|i| x_mod[j][i].coeff(t)).collect());
            }
        }
        // relations among block norms: sum_j c_j Tr_j(p) = 0
        let norms: Vec<AlgebraicNumber> = blocks
            .iter()
            .map(|f| {
                let sign = if f.deg() % 2 == 0 { rat(1) } else { rat(-1) };
                AlgebraicNumber::from_rational(&(sign * f.coeff(0)))
            })
            .collect();
        let traces: Vec<RatVector> = blocks
            .iter()
            .map(|f| {
                let c = companion(f);
                let mut p = RatMatrix::identity(f.deg());
                (0..k)
                    .map(|_| {
                        let t = p.trace();
                        p = &p * &c;
                        t
                    })
                    .collect()
            })
            .collect();
        let lattice = mult_relation_lattice(&norms).expect("nonzero norms");
        for c in &lattice.basis {
            let mut row = vec![Rational::zero(); k];
            for (cj, tr) in c.iter().zip(&traces) {
                let cj = Rational::from_integer(cj.clone());
                for (x, t) in row.iter_mut().zip(tr) {
                    *x += &cj * t;
                }
            }
            rows.push(row);
        }
    }
    let sols: Vec<RatVector> = if rows.is_empty() {
        RatMatrix::identity(k).row_vectors()
    } else {
        RatMatrix::from_rows(&rows).kernel()
    };
    let d = s.rows();
    let mut powers = vec![RatMatrix::identity(d)];
    for i in 1..k {
        powers.push(&powers[i - 1] * s);
    }
    let mut basis = EchelonBasis::new(d * d);
    for c in sols {
        let mut x = RatMatrix::zeros(d, d);
        for (ci, p) in c.iter().zip(&powers) {
            if !ci.is_zero() {
                x = &x + &p.scale(ci);
            }
        }
        basis.insert(&x.flatten());
    }
    (
        basis.basis().iter().map(|v| RatMatrix::unflatten(d, v)).collect(),
        complete,
    )
}
