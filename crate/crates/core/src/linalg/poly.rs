//! Univariate polynomials over the rationals, plus characteristic and minimal polynomials.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::matrix::{EchelonBasis, RatMatrix};
use super::rational::{format_rational, gcd_of_numerators, lcm_of_denominators, rat, Rational};

/// Coefficients lowest degree first; never carries trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatPoly {
    coeffs: Vec<Rational>,
}

impl RatPoly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        RatPoly { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| rat(c)).collect())
    }

    pub fn from_integers(coeffs: &[BigInt]) -> Self {
        Self::new(coeffs.iter().cloned().map(Rational::from_integer).collect())
    }

    pub fn zero() -> Self {
        RatPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![c])
    }

    /// The monomial `x`.
    pub fn x() -> Self {
        Self::from_i64(&[0, 1])
    }

    /// `x - r`.
    pub fn linear_root(r: &Rational) -> Self {
        Self::new(vec![-r.clone(), Rational::one()])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports `None`.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn deg(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Rational {
        self.coeffs.get(i).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn leading(&self) -> Rational {
        self.coeffs.last().cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last().is_some_and(One::is_one)
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let inv = self.leading().recip();
        Self::new(self.coeffs.iter().map(|c| c * &inv).collect())
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::new(self.coeffs.iter().map(|x| x * c).collect())
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        Self::new((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        Self::new((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        let mut c = vec![Rational::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Self::new(c)
    }

    pub fn pow(&self, e: usize) -> Self {
        (0..e).fold(Self::one(), |acc, _| acc.mul(self))
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        assert!(!d.is_zero(), "division by the zero polynomial");
        let dd = d.deg();
        let lead_inv = d.leading().recip();
        let mut r = self.coeffs.clone();
        if r.len() < d.coeffs.len() {
            return (Self::zero(), self.clone());
        }
        let mut q = vec![Rational::zero(); r.len() - dd];
        for k in (0..q.len()).rev() {
            let c = &r[k + dd] * &lead_inv;
            if !c.is_zero() {
                for (j, dc) in d.coeffs.iter().enumerate() {
                    r[k + j] -= &c * dc;
                }
            }
            q[k] = c;
        }
        r.truncate(dd);
        (Self::new(q), Self::new(r))
    }

    pub fn rem(&self, d: &Self) -> Self {
        self.div_rem(d).1
    }

    pub fn divides(&self, other: &Self) -> bool {
        other.rem(self).is_zero()
    }

    /// Monic greatest common divisor (zero if both inputs are zero).
    pub fn gcd(&self, o: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * rat(i as i64))
                .collect(),
        )
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * x + c)
    }

    /// Horner evaluation at a square matrix.
    pub fn eval_matrix(&self, m: &RatMatrix) -> RatMatrix {
        let n = m.rows();
        let mut acc = RatMatrix::zeros(n, n);
        for c in self.coeffs.iter().rev() {
            acc = &acc * m;
            if !c.is_zero() {
                for i in 0..n {
                    acc[(i, i)] += c;
                }
            }
        }
        acc
    }

    /// Primitive integer polynomial with positive leading coefficient, equal to `self` up to a rational unit.
    pub fn primitive_integer(&self) -> Vec<BigInt> {
        if self.is_zero() {
            return Vec::new();
        }
        let l = lcm_of_denominators(&self.coeffs);
        let scaled: Vec<Rational> = self.coeffs.iter().map(|c| c * Rational::from_integer(l.clone())).collect();
        let g = gcd_of_numerators(&scaled);
        let sign = if scaled.last().unwrap().is_negative() {
            -BigInt::one()
        } else {
            BigInt::one()
        };
        scaled
            .iter()
            .map(|c| c.to_integer() / &g * &sign)
            .collect()
    }

    /// Yun's square-free decomposition of a monic polynomial: `self = prod a_i^i` with `a_i` square-free, pairwise coprime.
    pub fn squarefree_decomposition(&self) -> Vec<(RatPoly, usize)> {
        let f = self.monic();
        if f.deg() == 0 {
            return Vec::new();
        }
        let mut out = Vec::new();
        let fp = f.derivative();
        let a = f.gcd(&fp);
        let mut b = f.div_rem(&a).0;
        let mut c = fp.div_rem(&a).0;
        let mut d = c.sub(&b.derivative());
        let mut i = 1;
        loop {
            let ai = b.gcd(&d);
            b = b.div_rem(&ai).0;
            c = d.div_rem(&ai).0;
            if ai.deg() > 0 {
                out.push((ai, i));
            }
            if b.deg() == 0 {
                break;
            }
            d = c.sub(&b.derivative());
            i += 1;
        }
        out
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.coeffs.iter().map(format_rational).collect()
    }

    /// Canonical order: degree, then coefficients from the constant term upward.
    pub fn canonical_cmp(&self, o: &Self) -> Ordering {
        self.coeffs
            .len()
            .cmp(&o.coeffs.len())
            .then_with(|| self.coeffs.cmp(&o.coeffs))
    }
}

impl fmt::Debug for RatPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for RatPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut terms = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let cs = format_rational(c);
            let t = match i {
                0 => cs,
                1 if c.is_one() => "x".to_string(),
                1 => format!("{cs}*x"),
                _ if c.is_one() => format!("x^{i}"),
                _ => format!("{cs}*x^{i}"),
            };
            terms.push(t);
        }
        write!(f, "{}", terms.join(" + "))
    }
}

/// Characteristic polynomial `det(xI - M)` by the Faddeev–LeVerrier recurrence.
pub fn characteristic_polynomial(m: &RatMatrix) -> RatPoly {
    assert!(m.is_square());
    let n = m.rows();
    let mut c = vec![Rational::zero(); n + 1];
    c[n] = Rational::one();
    let mut mk = RatMatrix::zeros(n, n);
    for k in 1..=n {
        let mut next = m * &mk;
        for i in 0..n {
            next[(i, i)] += &c[n - k + 1];
        }
        mk = next;
        let t = (m * &mk).trace();
        c[n - k] = -t / rat(k as i64);
    }
    RatPoly::new(c)
}

/// Minimal polynomial: the first linear dependency among `I, M, M^2, ...`.
pub fn minimal_polynomial(m: &RatMatrix) -> RatPoly {
    assert!(m.is_square());
    let n = m.rows();
    if n == 0 {
        return RatPoly::one();
    }
    let mut powers = vec![RatMatrix::identity(n)];
    let mut basis = EchelonBasis::new(n * n);
    basis.insert(&powers[0].flatten());
    loop {
        let next = &powers[powers.len() - 1] * m;
        if basis.contains(&next.flatten()) {
            // solve next = sum c_i powers[i]
            let k = powers.len();
            let cols: Vec<Vec<Rational>> = powers.iter().map(|p| p.flatten()).collect();
            let mut aug = RatMatrix::zeros(n * n, k + 1);
            for (j, col) in cols.iter().enumerate() {
                for (i, x) in col.iter().enumerate() {
                    aug[(i, j)] = x.clone();
                }
            }
            for (i, x) in next.flatten().iter().enumerate() {
                aug[(i, k)] = x.clone();
            }
            let r = aug.rref();
            let mut coeffs = vec![Rational::zero(); k + 1];
            for (row, &p) in r.pivots.iter().enumerate() {
                coeffs[p] = -r.matrix[(row, k)].clone();
            }
            coeffs[k] = Rational::one();
            return RatPoly::new(coeffs);
        }
        basis.insert(&next.flatten());
        powers.push(next);
    }
}

/// Characteristic and minimal polynomial together.
pub fn annihilating_polys(m: &RatMatrix) -> (RatPoly, RatPoly) {
    (characteristic_polynomial(m), minimal_polynomial(m))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn annihilating_examples() {
        let (c, m) = annihilating_polys(&RatMatrix::from_i64(&[&[2, 1], &[1, 1]]));
        assert_eq!(c, RatPoly::from_i64(&[1, -3, 1]));
        assert_eq!(m, c);

        let (c, m) = annihilating_polys(&RatMatrix::identity(2));
        assert_eq!(c, RatPoly::from_i64(&[1, -2, 1]));
        assert_eq!(m, RatPoly::from_i64(&[-1, 1]));

        let (c, m) = annihilating_polys(&RatMatrix::from_i64(&[&[0, -1], &[1, 0]]));
        assert_eq!(c, RatPoly::from_i64(&[1, 0, 1]));
        assert_eq!(m, c);
    }

    #[test]
    fn division_and_gcd() {
        let a = RatPoly::from_i64(&[-1, 0, 0, 0, 1]);
        let b = RatPoly::from_i64(&[1, 0, 1]);
        let (q, r) = a.div_rem(&b);
        assert!(r.is_zero());
        assert_eq!(q, RatPoly::from_i64(&[-1, 0, 1]));
        assert_eq!(a.gcd(&RatPoly::from_i64(&[-1, 1])), RatPoly::from_i64(&[-1, 1]));
    }

    #[test]
    fn squarefree_parts() {
        // (x-1)^2 (x+2)
        let p = RatPoly::from_i64(&[-1, 1]).pow(2).mul(&RatPoly::from_i64(&[2, 1]));
        let sq = p.squarefree_decomposition();
        assert_eq!(
            sq,
            vec![(RatPoly::from_i64(&[2, 1]), 1), (RatPoly::from_i64(&[-1, 1]), 2)]
        );
    }

    #[test]
    fn display() {
        assert_eq!(RatPoly::from_i64(&[1, -3, 1]).to_string(), "x^2 + -3*x + 1");
    }
}
