//! Rational scalars and their string encoding.

use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::ParseError;

/// Arbitrary-precision rational, always kept in lowest terms with a positive denominator.
pub type Rational = BigRational;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `"p/q"` or `"p"`. Surrounding whitespace is ignored, `q` must be nonzero.
pub fn parse_rational(s: &str) -> Result<Rational, ParseError> {
    let s = s.trim();
    let bad = || ParseError::BadRational(s.to_string());
    match s.split_once('/') {
        Some((n, d)) => {
            let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
            let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(n, d))
        }
        None => Ok(Rational::from_integer(
            BigInt::from_str(s).map_err(|_| bad())?,
        )),
    }
}

/// Canonical text form: `"p"` when the denominator is one, `"p/q"` otherwise.
pub fn format_rational(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn lcm_of_denominators<'a, I: IntoIterator<Item = &'a Rational>>(it: I) -> BigInt {
    it.into_iter()
        .fold(BigInt::one(), |acc, q| acc.lcm(q.denom()))
}

pub fn gcd_of_numerators<'a, I: IntoIterator<Item = &'a Rational>>(it: I) -> BigInt {
    it.into_iter()
        .fold(BigInt::zero(), |acc, q| acc.gcd(q.numer()))
}

/// Scales a rational vector to a primitive integer vector whose first nonzero entry is positive.
pub fn primitive_integer_vector(v: &[Rational]) -> Vec<BigInt> {
    let l = lcm_of_denominators(v);
    let ints: Vec<BigInt> = v.iter().map(|q| (q * &l).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return ints;
    }
    let sign = ints
        .iter()
        .find(|x| !x.is_zero())
        .map(|x| if x.is_negative() { -BigInt::one() } else { BigInt::one() })
        .unwrap_or_else(BigInt::one);
    ints.into_iter().map(|x| &x / &g * &sign).collect()
}

pub fn to_f64(q: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    q.to_f64().unwrap_or_else(|| {
        // numerator/denominator overflow f64 individually; shift both down
        let nb = q.numer().bits() as i64;
        let db = q.denom().bits() as i64;
        let shift_n = (nb - 60).max(0) as usize;
        let shift_d = (db - 60).max(0) as usize;
        let n = (q.numer() >> shift_n).to_f64().unwrap_or(0.0);
        let d = (q.denom() >> shift_d).to_f64().unwrap_or(1.0);
        n / d * 2f64.powi(shift_n as i32 - shift_d as i32)
    })
}

/// Reduces a rational to the unit interval `[0, 1)`.
pub fn frac(q: &Rational) -> Rational {
    q - q.floor()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_rational("4/6").unwrap(), ratio(2, 3));
        assert_eq!(parse_rational(" -3 ").unwrap(), rat(-3));
        assert_eq!(parse_rational("3/-6").unwrap(), ratio(-1, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
        assert_eq!(format_rational(&ratio(-4, 2)), "-2");
        assert_eq!(format_rational(&ratio(1, 3)), "1/3");
    }

    #[test]
    fn primitive_vector() {
        let v = vec![ratio(-1, 2), ratio(-1, 2)];
        assert_eq!(
            primitive_integer_vector(&v),
            vec![BigInt::from(1), BigInt::from(1)]
        );
    }

    #[test]
    fn fractional_part() {
        assert_eq!(frac(&ratio(-1, 3)), ratio(2, 3));
        assert_eq!(frac(&ratio(7, 3)), ratio(1, 3));
    }
}
