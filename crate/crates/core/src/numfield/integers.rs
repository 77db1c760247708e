//! Integer helpers: factorization, square-free parts, p-adic valuations and square roots.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// p-adic valuation of a nonzero integer.
pub fn valuation(n: &BigInt, p: &BigInt) -> u32 {
    assert!(!n.is_zero());
    let mut n = n.abs();
    let mut v = 0;
    loop {
        let (q, r) = n.div_rem(p);
        if !r.is_zero() {
            return v;
        }
        n = q;
        v += 1;
    }
}

fn pow_mod(b: &BigInt, e: &BigInt, m: &BigInt) -> BigInt {
    b.modpow(e, m)
}

/// Deterministic Miller–Rabin for n < 3.3e24, probabilistic beyond with fixed bases.
pub fn is_prime(n: &BigInt) -> bool {
    let two = BigInt::from(2);
    if *n < two {
        return false;
    }
    for p in [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41] {
        let p = BigInt::from(p);
        if *n == p {
            return true;
        }
        if (n % &p).is_zero() {
            return false;
        }
    }
    let nm1 = n - 1;
    let s = valuation(&nm1, &two);
    let d = &nm1 >> s;
    'witness: for a in [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41] {
        let mut x = pow_mod(&BigInt::from(a), &d, n);
        if x.is_one() || x == nm1 {
            continue;
        }
        for _ in 1..s {
            x = &x * &x % n;
            if x == nm1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn pollard_rho(n: &BigInt) -> BigInt {
    if n.is_even() {
        return BigInt::from(2);
    }
    let mut c = BigInt::one();
    loop {
        let f = |x: &BigInt| (x * x + &c) % n;
        let (mut x, mut y, mut d) = (BigInt::from(2), BigInt::from(2), BigInt::one());
        while d.is_one() {
            x = f(&x);
            y = f(&f(&y));
            d = (&x - &y).abs().gcd(n);
        }
        if &d != n {
            return d;
        }
        c += 1;
    }
}

/// Prime factorization of `|n|` (n nonzero), primes ascending.
pub fn factor_integer(n: &BigInt) -> Vec<(BigInt, u32)> {
    assert!(!n.is_zero());
    let mut n = n.abs();
    let mut out: Vec<(BigInt, u32)> = Vec::new();
    let mut p = 2u64;
    while p < 10_000 {
        let bp = BigInt::from(p);
        if &bp * &bp > n {
            break;
        }
        if (&n % &bp).is_zero() {
            let v = valuation(&n, &bp);
            n /= bp.pow(v);
            out.push((bp, v));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    let mut stack = vec![n];
    let mut big: Vec<BigInt> = Vec::new();
    while let Some(m) = stack.pop() {
        if m.is_one() {
            continue;
        }
        if is_prime(&m) {
            big.push(m);
            continue;
        }
        let d = pollard_rho(&m);
        stack.push(&m / &d);
        stack.push(d);
    }
    big.sort();
    for q in big {
        match out.last_mut() {
            Some((last, v)) if *last == q => *v += 1,
            _ => out.push((q, 1)),
        }
    }
    out.sort();
    out
}

/// Square-free part `D` of a nonzero integer (sign kept), so `n = D * f^2`. Returns `(D, f)`.
pub fn squarefree_part(n: &BigInt) -> (BigInt, BigInt) {
    let mut d = if n.is_negative() { -BigInt::one() } else { BigInt::one() };
    let mut f = BigInt::one();
    for (p, e) in factor_integer(n) {
        if e % 2 == 1 {
            d *= &p;
        }
        f *= p.pow(e / 2);
    }
    (d, f)
}

pub fn is_square(n: &BigInt) -> bool {
    !n.is_negative() && {
        let r = n.sqrt();
        &r * &r == *n
    }
}

/// Legendre symbol `(a / p)` for an odd prime `p`.
pub fn legendre(a: &BigInt, p: &BigInt) -> i32 {
    let a = a.mod_floor(p);
    if a.is_zero() {
        return 0;
    }
    let e = (p - 1) / 2;
    if a.modpow(&e, p).is_one() {
        1
    } else {
        -1
    }
}

/// A square root of `d` in `Z / p^k`, assuming one exists and `p` does not divide `d`
/// (for `p = 2` this requires `d = 1 mod 8`).
pub fn sqrt_mod_prime_power(d: &BigInt, p: &BigInt, k: u32) -> BigInt {
    let two = BigInt::from(2);
    let m = p.pow(k);
    if *p == two {
        // lift bit by bit: r^2 = d mod 2^j
        let mut r = BigInt::one();
        for j in 3..=k.max(3) {
            let mj = two.pow(j);
            if ((&r * &r - d).mod_floor(&mj)).is_zero() {
                continue;
            }
            r += two.pow(j - 2);
        }
        return r.mod_floor(&m);
    }
    let r0 = sqrt_mod_prime(&d.mod_floor(p), p);
    // Hensel: r <- r - (r^2 - d) / (2r)
    let mut r = r0;
    let mut pk = p.clone();
    while pk < m {
        pk = (&pk * &pk).min(m.clone());
        let inv = (BigInt::from(2) * &r).modinv(&pk).expect("2r is a unit");
        r = (&r - (&r * &r - d) * inv).mod_floor(&pk);
    }
    r.mod_floor(&m)
}

/// Tonelli–Shanks square root modulo an odd prime.
fn sqrt_mod_prime(a: &BigInt, p: &BigInt) -> BigInt {
    if let Some(ps) = p.to_u64() {
        if ps < 1 << 16 {
            let a = a.to_u64().unwrap();
            for x in 0..ps {
                if x * x % ps == a {
                    return BigInt::from(x);
                }
            }
        }
    }
    let one = BigInt::one();
    let two = BigInt::from(2);
    let pm1 = p - 1u32;
    let s = valuation(&pm1, &two);
    let q = &pm1 >> s;
    let mut z = two.clone();
    while legendre(&z, p) != -1 {
        z += 1;
    }
    let mut m = s;
    let mut c = z.modpow(&q, p);
    let mut t = a.modpow(&q, p);
    let mut r = a.modpow(&((&q + &one) / &two), p);
    while !t.is_one() {
        let mut i = 0;
        let mut tt = t.clone();
        while !tt.is_one() {
            tt = &tt * &tt % p;
            i += 1;
        }
        let b = c.modpow(&two.pow(m - i - 1), p);
        m = i;
        c = &b * &b % p;
        t = &t * &c % p;
        r = &r * &b % p;
    }
    r
}

/// Refines a list of positive integers (> 1) into a pairwise-coprime base over which each factors.
pub fn coprime_base(values: &[BigInt]) -> Vec<BigInt> {
    let mut base: Vec<BigInt> = Vec::new();
    for v in values {
        let v = v.abs();
        if v > BigInt::one() {
            base.push(v);
        }
    }
    loop {
        let mut changed = false;
        'outer: for i in 0..base.len() {
            for j in i + 1..base.len() {
                let g = base[i].gcd(&base[j]);
                if !g.is_one() {
                    let (a, b) = (base[i].clone(), base[j].clone());
                    base.swap_remove(j);
                    base.swap_remove(i);
                    for x in [&a / &g, &b / &g, g] {
                        if x > BigInt::one() {
                            base.push(x);
                        }
                    }
                    changed = true;
                    break 'outer;
                }
            }
        }
        if !changed {
            break;
        }
    }
    base.sort();
    base.dedup();
    base
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(n: i64) -> BigInt {
        BigInt::from(n)
    }

    #[test]
    fn factoring() {
        assert_eq!(factor_integer(&b(360)), vec![(b(2), 3), (b(3), 2), (b(5), 1)]);
        let big = b(1_000_003) * b(999_983);
        assert_eq!(factor_integer(&big), vec![(b(999_983), 1), (b(1_000_003), 1)]);
        assert_eq!(squarefree_part(&b(-12)), (b(-3), b(2)));
        assert_eq!(squarefree_part(&b(5)), (b(5), b(1)));
    }

    #[test]
    fn padic_square_roots() {
        for (d, p, k) in [(2, 7, 5), (5, 11, 4), (17, 2, 10), (-7, 2, 12), (3, 13, 3)] {
            let (d, p) = (b(d), b(p));
            let r = sqrt_mod_prime_power(&d, &p, k);
            let m = p.pow(k);
            assert!((&r * &r - &d).mod_floor(&m).is_zero(), "d={d} p={p}");
        }
    }

    #[test]
    fn coprime_refinement() {
        let base = coprime_base(&[b(12), b(18), b(5)]);
        assert_eq!(base, vec![b(2), b(3), b(5)]);
        let base = coprime_base(&[b(6), b(10)]);
        assert_eq!(base, vec![b(2), b(3), b(5)]);
    }
}
