//! Algebraic numbers given by a minimal polynomial and an isolating region.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::NumberFieldError;
use crate::linalg::factor::is_irreducible;
use crate::linalg::poly::RatPoly;
use crate::linalg::rational::{format_rational, parse_rational, to_f64, Rational};

use super::integers::squarefree_part;
use super::quadratic::QuadElem;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RootSelector {
    /// Closed real interval `[lo, hi]` containing exactly one root.
    Interval { lo: Rational, hi: Rational },
    /// Closed rectangle in the complex plane containing exactly one root.
    Rectangle {
        re_lo: Rational,
        re_hi: Rational,
        im_lo: Rational,
        im_hi: Rational,
    },
}

impl RootSelector {
    fn contains(&self, z: Complex64) -> bool {
        match self {
            RootSelector::Interval { lo, hi } => {
                z.im.abs() < 1e-9 * (1.0 + z.re.abs()) && to_f64(lo) - 1e-12 <= z.re && z.re <= to_f64(hi) + 1e-12
            }
            RootSelector::Rectangle {
                re_lo,
                re_hi,
                im_lo,
                im_hi,
            } => {
                to_f64(re_lo) <= z.re
                    && z.re <= to_f64(re_hi)
                    && to_f64(im_lo) <= z.im
                    && z.im <= to_f64(im_hi)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgebraicNumber {
    min_poly: RatPoly,
    selector: RootSelector,
}

/// Serialized form used inside certificates.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgebraicNumberJson {
    pub min_poly: Vec<String>,
    pub selector: Vec<String>,
}

impl AlgebraicNumber {
    pub fn from_rational(q: &Rational) -> Self {
        AlgebraicNumber {
            min_poly: RatPoly::linear_root(q),
            selector: RootSelector::Interval {
                lo: q.clone(),
                hi: q.clone(),
            },
        }
    }

    pub fn min_poly(&self) -> &RatPoly {
        &self.min_poly
    }

    pub fn selector(&self) -> &RootSelector {
        &self.selector
    }

    pub fn degree(&self) -> usize {
        self.min_poly.deg()
    }

    pub fn as_rational(&self) -> Option<Rational> {
        (self.degree() == 1).then(|| -self.min_poly.coeff(0))
    }

    pub fn is_zero(&self) -> bool {
        self.as_rational().is_some_and(|q| q.is_zero())
    }

    /// All roots of an irreducible polynomial, each with its own isolating region.
    pub fn roots_of(p: &RatPoly) -> Result<Vec<AlgebraicNumber>, NumberFieldError> {
        if !is_irreducible(p) {
            return Err(NumberFieldError::NotIrreducible(p.to_string()));
        }
        let p = p.monic();
        match p.deg() {
            1 => Ok(vec![Self::from_rational(&-p.coeff(0))]),
            2 => {
                let (r1, r2) = quadratic_roots(&p);
                Ok([r1, r2]
                    .iter()
                    .map(|r| {
                        let (re, im) = r.to_complex();
                        let sep = {
                            let (a, b) = r.conj().to_complex();
                            ((a - re).powi(2) + (b - im).powi(2)).sqrt()
                        };
                        AlgebraicNumber {
                            min_poly: p.clone(),
                            selector: selector_around(Complex64::new(re, im), sep / 4.0, im == 0.0),
                        }
                    })
                    .collect())
            }
            _ => {
                let roots = numeric_roots(&p);
                let mut sep = f64::INFINITY;
                for i in 0..roots.len() {
                    for j in i + 1..roots.len() {
                        sep = sep.min((roots[i] - roots[j]).norm());
                    }
                }
                Ok(roots
                    .iter()
                    .map(|&z| AlgebraicNumber {
                        min_poly: p.clone(),
                        selector: selector_around(z, sep / 3.0, z.im.abs() < 1e-9 * (1.0 + z.norm())),
                    })
                    .collect())
            }
        }
    }

    /// Exact representation in `Q` (with `D = 1`) or in `Q(sqrt D)` for degree two.
    pub fn as_quadratic(&self) -> Option<QuadElem> {
        match self.degree() {
            1 => Some(QuadElem::rational(self.as_rational().unwrap(), BigInt::one())),
            2 => {
                let (r1, r2) = quadratic_roots(&self.min_poly);
                let z = |r: &QuadElem| {
                    let (a, b) = r.to_complex();
                    Complex64::new(a, b)
                };
                if self.selector.contains(z(&r1)) {
                    Some(r1)
                } else if self.selector.contains(z(&r2)) {
                    Some(r2)
                } else {
                    None
                }
            }
            _ => None,
        }
    }

    /// Floating approximation of the selected root.
    pub fn approx(&self) -> Complex64 {
        if let Some(q) = self.as_quadratic() {
            let (a, b) = q.to_complex();
            return Complex64::new(a, b);
        }
        numeric_roots(&self.min_poly)
            .into_iter()
            .find(|&z| self.selector.contains(z))
            .unwrap_or_default()
    }

    pub fn to_json(&self) -> AlgebraicNumberJson {
        let selector = match &self.selector {
            RootSelector::Interval { lo, hi } => vec![format_rational(lo), format_rational(hi)],
            RootSelector::Rectangle {
                re_lo,
                re_hi,
                im_lo,
                im_hi,
            } => [re_lo, re_hi, im_lo, im_hi].iter().map(|q| format_rational(q)).collect(),
        };
        AlgebraicNumberJson {
            min_poly: self.min_poly.to_strings(),
            selector,
        }
    }

    pub fn from_json(j: &AlgebraicNumberJson) -> Option<Self> {
        let coeffs: Option<Vec<Rational>> = j.min_poly.iter().map(|s| parse_rational(s).ok()).collect();
        let sel: Option<Vec<Rational>> = j.selector.iter().map(|s| parse_rational(s).ok()).collect();
        let sel = sel?;
        let selector = match sel.len() {
            2 => RootSelector::Interval {
                lo: sel[0].clone(),
                hi: sel[1].clone(),
            },
            4 => RootSelector::Rectangle {
                re_lo: sel[0].clone(),
                re_hi: sel[1].clone(),
                im_lo: sel[2].clone(),
                im_hi: sel[3].clone(),
            },
            _ => return None,
        };
        Some(AlgebraicNumber {
            min_poly: RatPoly::new(coeffs?),
            selector,
        })
    }
}

fn approx_rational(x: f64) -> Rational {
    BigRational::from_float(x).unwrap_or_else(Rational::zero)
}

fn selector_around(z: Complex64, delta: f64, real: bool) -> RootSelector {
    let delta = if delta.is_finite() && delta > 0.0 { delta } else { 0.5 };
    if real {
        RootSelector::Interval {
            lo: approx_rational(z.re - delta),
            hi: approx_rational(z.re + delta),
        }
    } else {
        RootSelector::Rectangle {
            re_lo: approx_rational(z.re - delta),
            re_hi: approx_rational(z.re + delta),
            im_lo: approx_rational(z.im - delta),
            im_hi: approx_rational(z.im + delta),
        }
    }
}

/// The two roots of a monic irreducible quadratic, `+sqrt` first.
fn quadratic_roots(p: &RatPoly) -> (QuadElem, QuadElem) {
    let b = p.coeff(1);
    let c = p.coeff(0);
    let disc = &b * &b - Rational::from_integer(BigInt::from(4)) * &c;
    // disc = n / m = n m / m^2 = D f^2 / m^2
    let nm = disc.numer() * disc.denom();
    let (d, f) = squarefree_part(&nm);
    let half = Rational::new(BigInt::one(), BigInt::from(2));
    let a = -&b * &half;
    let coef = Rational::new(f, disc.denom().clone()) * &half;
    (
        QuadElem::new(a.clone(), coef.clone(), d.clone()),
        QuadElem::new(a, -coef, d),
    )
}

/// Aberth–Ehrlich simultaneous root approximation.
pub fn numeric_roots(p: &RatPoly) -> Vec<Complex64> {
    let n = p.deg();
    let c: Vec<Complex64> = p.coeffs().iter().map(|q| Complex64::new(to_f64(q), 0.0)).collect();
    let lead = c[n];
    let eval = |z: Complex64| -> (Complex64, Complex64) {
        let mut v = Complex64::zero();
        let mut dv = Complex64::zero();
        for k in (0..=n).rev() {
            dv = dv * z + v;
            v = v * z + c[k];
        }
        (v, dv)
    };
    let radius = 1.0
        + c[..n]
            .iter()
            .map(|x| (x / lead).norm())
            .fold(0.0f64, f64::max);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(radius * 0.7, 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4))
        .collect();
    for _ in 0..2000 {
        let mut moved = 0.0f64;
        for i in 0..n {
            let (v, dv) = eval(z[i]);
            if v.norm() == 0.0 {
                continue;
            }
            let ratio = v / dv;
            let s: Complex64 = (0..n).filter(|&j| j != i).map(|j| (z[i] - z[j]).inv()).sum();
            let w = ratio / (Complex64::one() - ratio * s);
            z[i] -= w;
            moved = moved.max(w.norm() / (1.0 + z[i].norm()));
        }
        if moved < 1e-15 {
            break;
        }
    }
    for r in z.iter_mut() {
        if r.im.abs() < 1e-10 * (1.0 + r.re.abs()) {
            r.im = 0.0;
        }
    }
    z.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap().then(a.im.partial_cmp(&b.im).unwrap()));
    z
}

fn euler_phi(mut m: u64) -> u64 {
    let mut result = m;
    let mut p = 2;
    while p * p <= m {
        if m % p == 0 {
            while m % p == 0 {
                m /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if m > 1 {
        result -= result / m;
    }
    result
}

fn mobius(mut m: u64) -> i32 {
    let mut r = 1;
    let mut p = 2;
    while p * p <= m {
        if m % p == 0 {
            m /= p;
            if m % p == 0 {
                return 0;
            }
            r = -r;
        }
        p += 1;
    }
    if m > 1 {
        r = -r;
    }
    r
}

/// The `m`-th cyclotomic polynomial.
pub fn cyclotomic(m: u64) -> RatPoly {
    let mut num = RatPoly::one();
    let mut den = RatPoly::one();
    for d in 1..=m {
        if m % d != 0 {
            continue;
        }
        let mut c = vec![Rational::zero(); d as usize + 1];
        c[0] = -Rational::one();
        c[d as usize] = Rational::one();
        let f = RatPoly::new(c);
        match mobius(m / d) {
            1 => num = num.mul(&f),
            -1 => den = den.mul(&f),
            _ => {}
        }
    }
    num.div_rem(&den).0
}

/// Order `n` of `lambda` as a root of unity, if it is one.
pub fn root_of_unity_order(lambda: &AlgebraicNumber) -> Option<u64> {
    let p = lambda.min_poly().monic();
    let n = p.deg() as u64;
    if !p.coeff(0).abs().is_one() || p.coeffs().iter().any(|c| !c.is_integer()) {
        return None;
    }
    let bound = (2 * n * n).max(2);
    (1..=bound)
        .filter(|&m| euler_phi(m) == n)
        .find(|&m| cyclotomic(m) == p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rational::rat;

    #[test]
    fn roots_of_unity_orders() {
        let minus_one = AlgebraicNumber::from_rational(&rat(-1));
        assert_eq!(root_of_unity_order(&minus_one), Some(2));
        let i = &AlgebraicNumber::roots_of(&RatPoly::from_i64(&[1, 0, 1])).unwrap()[0];
        assert_eq!(root_of_unity_order(i), Some(4));
        let golden = &AlgebraicNumber::roots_of(&RatPoly::from_i64(&[1, -3, 1])).unwrap()[0];
        assert_eq!(root_of_unity_order(golden), None);
        let z12 = &AlgebraicNumber::roots_of(&cyclotomic(12)).unwrap()[1];
        assert_eq!(root_of_unity_order(z12), Some(12));
        assert!(cyclotomic(12).divides(&RatPoly::from_i64(&[-1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1])));
    }

    #[test]
    fn quadratic_selectors_distinguish_conjugates() {
        let roots = AlgebraicNumber::roots_of(&RatPoly::from_i64(&[1, -3, 1])).unwrap();
        let q0 = roots[0].as_quadratic().unwrap();
        let q1 = roots[1].as_quadratic().unwrap();
        assert_eq!(q0.conj(), q1);
        assert_eq!(q0.d, BigInt::from(5));
        let s: f64 = roots.iter().map(|r| r.approx().re).sum();
        assert!((s - 3.0).abs() < 1e-12);
    }

    #[test]
    fn cubic_roots_are_isolated() {
        let p = RatPoly::from_i64(&[-2, 0, 0, 1]);
        let roots = AlgebraicNumber::roots_of(&p).unwrap();
        assert_eq!(roots.len(), 3);
        let real: Vec<_> = roots
            .iter()
            .filter(|r| matches!(r.selector(), RootSelector::Interval { .. }))
            .collect();
        assert_eq!(real.len(), 1);
        assert!((real[0].approx().re - 2f64.cbrt()).abs() < 1e-12);
        let back = AlgebraicNumber::from_json(&roots[1].to_json()).unwrap();
        assert_eq!(back, roots[1]);
    }
}
