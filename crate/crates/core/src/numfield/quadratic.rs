//! Exact arithmetic in `Q(sqrt(D))` for a square-free integer `D != 1`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::linalg::rational::{format_rational, to_f64, Rational};

/// `a + b sqrt(D)`; `D = 1` is allowed only with `b = 0` and stands for plain rationals.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QuadElem {
    pub a: Rational,
    pub b: Rational,
    pub d: BigInt,
}

impl QuadElem {
    pub fn new(a: Rational, b: Rational, d: BigInt) -> Self {
        QuadElem { a, b, d }
    }

    pub fn rational(a: Rational, d: BigInt) -> Self {
        QuadElem {
            a,
            b: Rational::zero(),
            d,
        }
    }

    pub fn one(d: BigInt) -> Self {
        Self::rational(Rational::one(), d)
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.a.is_one() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn conj(&self) -> Self {
        QuadElem::new(self.a.clone(), -self.b.clone(), self.d.clone())
    }

    pub fn norm(&self) -> Rational {
        &self.a * &self.a - &self.b * &self.b * Rational::from_integer(self.d.clone())
    }

    pub fn trace(&self) -> Rational {
        &self.a + &self.a
    }

    pub fn inv(&self) -> Self {
        let n = self.norm();
        assert!(!n.is_zero(), "inverse of zero");
        QuadElem::new(&self.a / &n, -&self.b / &n, self.d.clone())
    }

    pub fn pow(&self, e: i64) -> Self {
        let mut base = if e < 0 { self.inv() } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = QuadElem::one(self.d.clone());
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn pow_big(&self, e: &BigInt) -> Self {
        use num_traits::ToPrimitive;
        self.pow(e.to_i64().expect("exponent fits in i64"))
    }

    /// Floating approximation (real part, imaginary part) under `sqrt(D) > 0` or `sqrt(D) = i sqrt(|D|)`.
    pub fn to_complex(&self) -> (f64, f64) {
        let a = to_f64(&self.a);
        let b = to_f64(&self.b);
        let s = to_f64(&Rational::from_integer(self.d.abs())).sqrt();
        if self.d.is_negative() {
            (a, b * s)
        } else {
            (a + b * s, 0.0)
        }
    }

    /// Sign of the real embedding (`sqrt(D) > 0`) for real quadratic fields.
    pub fn real_sign(&self) -> i32 {
        assert!(!self.d.is_negative());
        let sa = sign(&self.a);
        let sb = sign(&self.b);
        if sb == 0 {
            return sa;
        }
        if sa == 0 || sa == sb {
            return sb;
        }
        // a and b sqrt(D) have opposite signs: compare a^2 with b^2 D
        let lhs = &self.a * &self.a;
        let rhs = &self.b * &self.b * Rational::from_integer(self.d.clone());
        if lhs > rhs {
            sa
        } else if lhs < rhs {
            sb
        } else {
            0
        }
    }

    /// `ln |x|` under the real embedding, computed without cancellation.
    pub fn ln_abs_real(&self) -> f64 {
        let sa = sign(&self.a);
        let sb = sign(&self.b);
        if sa == 0 || sb == 0 || sa == sb {
            let s = ln_rational(&Rational::from_integer(self.d.clone())) / 2.0;
            let la = if sa == 0 { f64::NEG_INFINITY } else { ln_rational(&self.a.abs()) };
            let lb = if sb == 0 {
                f64::NEG_INFINITY
            } else {
                ln_rational(&self.b.abs()) + s
            };
            let (hi, lo) = if la > lb { (la, lb) } else { (lb, la) };
            hi + (lo - hi).exp().ln_1p()
        } else {
            ln_rational(&self.norm().abs()) - self.conj().ln_abs_real()
        }
    }
}

fn sign(q: &Rational) -> i32 {
    if q.is_zero() {
        0
    } else if q.is_positive() {
        1
    } else {
        -1
    }
}

/// Natural logarithm of a positive rational of any size.
pub fn ln_rational(q: &Rational) -> f64 {
    fn ln_int(n: &BigInt) -> f64 {
        use num_traits::ToPrimitive;
        let bits = n.bits();
        if bits < 1000 {
            return n.to_f64().unwrap().ln();
        }
        let shift = bits - 64;
        (n >> shift).to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
    }
    ln_int(q.numer()) - ln_int(q.denom())
}

impl Add for &QuadElem {
    type Output = QuadElem;
    fn add(self, o: &QuadElem) -> QuadElem {
        QuadElem::new(&self.a + &o.a, &self.b + &o.b, self.d.clone())
    }
}

impl Sub for &QuadElem {
    type Output = QuadElem;
    fn sub(self, o: &QuadElem) -> QuadElem {
        QuadElem::new(&self.a - &o.a, &self.b - &o.b, self.d.clone())
    }
}

impl Mul for &QuadElem {
    type Output = QuadElem;
    fn mul(self, o: &QuadElem) -> QuadElem {
        let d = Rational::from_integer(self.d.clone());
        QuadElem::new(
            &self.a * &o.a + &self.b * &o.b * d,
            &self.a * &o.b + &self.b * &o.a,
            self.d.clone(),
        )
    }
}

impl Neg for &QuadElem {
    type Output = QuadElem;
    fn neg(self) -> QuadElem {
        QuadElem::new(-&self.a, -&self.b, self.d.clone())
    }
}

impl fmt::Debug for QuadElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            write!(f, "{}", format_rational(&self.a))
        } else {
            write!(
                f,
                "{} + {}*sqrt({})",
                format_rational(&self.a),
                format_rational(&self.b),
                self.d
            )
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rational::ratio;

    #[test]
    fn golden_unit_arithmetic() {
        let d = BigInt::from(5);
        let eps = QuadElem::new(ratio(3, 2), ratio(1, 2), d.clone());
        assert_eq!(eps.norm(), ratio(1, 1));
        assert!((&eps * &eps.inv()).is_one());
        let e5 = eps.pow(-5);
        assert!((&e5 * &eps.pow(5)).is_one());
        assert!((eps.ln_abs_real() - ((3.0 + 5f64.sqrt()) / 2.0).ln()).abs() < 1e-12);
        assert!((e5.ln_abs_real() + 5.0 * eps.ln_abs_real()).abs() < 1e-9);
        assert_eq!(eps.conj().real_sign(), 1);
        assert_eq!(QuadElem::new(ratio(1, 1), ratio(-1, 1), d).real_sign(), -1);
    }
}
