//! Factorization of rational polynomials: content removal, square-free split,
//! factorization modulo a prime, Hensel lifting, and factor recombination.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::poly::RatPoly;

/// Irreducible monic factors with multiplicities, in canonical order.
pub fn factor_poly(p: &RatPoly) -> Vec<(RatPoly, usize)> {
    assert!(!p.is_zero(), "cannot factor the zero polynomial");
    let mut out = Vec::new();
    for (part, mult) in p.squarefree_decomposition() {
        for f in factor_squarefree(&part) {
            out.push((f, mult));
        }
    }
    out.sort_by(|a, b| a.0.canonical_cmp(&b.0).then(a.1.cmp(&b.1)));
    out
}

/// True iff `p` has positive degree and no nontrivial factorization over Q.
pub fn is_irreducible(p: &RatPoly) -> bool {
    if p.is_zero() || p.deg() == 0 {
        return false;
    }
    let f = factor_poly(p);
    f.len() == 1 && f[0].1 == 1
}

fn factor_squarefree(f: &RatPoly) -> Vec<RatPoly> {
    let f = f.monic();
    if f.deg() <= 1 {
        return vec![f];
    }
    let mut g = f.primitive_integer();
    let mut out = Vec::new();
    if g[0].is_zero() {
        out.push(RatPoly::x());
        g.remove(0);
    }
    if g.len() <= 2 {
        if g.len() == 2 {
            out.push(RatPoly::from_integers(&g).monic());
        }
        return out;
    }
    for h in zassenhaus(&g) {
        out.push(RatPoly::from_integers(&h).monic());
    }
    out
}

type ZPoly = Vec<BigInt>;

fn ztrim(mut p: ZPoly) -> ZPoly {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
    p
}

fn zmul(a: &[BigInt], b: &[BigInt]) -> ZPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut c = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            c[i + j] += x * y;
        }
    }
    ztrim(c)
}

/// Exact division over Z; `None` when `d` does not divide `a`.
fn zdiv_exact(a: &[BigInt], d: &[BigInt]) -> Option<ZPoly> {
    let a = ztrim(a.to_vec());
    let d = ztrim(d.to_vec());
    if d.is_empty() {
        return None;
    }
    if a.len() < d.len() {
        return if a.is_empty() { Some(Vec::new()) } else { None };
    }
    let dl = d.last().unwrap().clone();
    let mut r = a;
    let mut q = vec![BigInt::zero(); r.len() - d.len() + 1];
    for k in (0..q.len()).rev() {
        let top = &r[k + d.len() - 1];
        if top.is_zero() {
            continue;
        }
        let (c, rem) = top.div_rem(&dl);
        if !rem.is_zero() {
            return None;
        }
        for (j, dc) in d.iter().enumerate() {
            r[k + j] -= &c * dc;
        }
        q[k] = c;
    }
    if r.iter().all(Zero::is_zero) {
        Some(ztrim(q))
    } else {
        None
    }
}

fn content(p: &[BigInt]) -> BigInt {
    p.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x))
}

fn primitive_part(p: &[BigInt]) -> ZPoly {
    let c = content(p);
    let sign = if p.last().is_some_and(Signed::is_negative) {
        -BigInt::one()
    } else {
        BigInt::one()
    };
    p.iter().map(|x| x / &c * &sign).collect()
}

// ---------- arithmetic in F_p[x] ----------

#[derive(Clone, Copy)]
struct Fp(u64);

impl Fp {
    fn mul(self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.0 as u128) as u64
    }
    fn add(self, a: u64, b: u64) -> u64 {
        (a + b) % self.0
    }
    fn sub(self, a: u64, b: u64) -> u64 {
        (a + self.0 - b) % self.0
    }
    fn inv(self, a: u64) -> u64 {
        self.pow(a, self.0 - 2)
    }
    fn pow(self, mut a: u64, mut e: u64) -> u64 {
        let mut r = 1;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        r
    }

    fn trim(self, mut p: Vec<u64>) -> Vec<u64> {
        while p.last() == Some(&0) {
            p.pop();
        }
        p
    }

    fn reduce(self, p: &[BigInt]) -> Vec<u64> {
        let m = BigInt::from(self.0);
        self.trim(
            p.iter()
                .map(|c| c.mod_floor(&m).to_u64().unwrap())
                .collect(),
        )
    }

    fn padd(self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let n = a.len().max(b.len());
        self.trim(
            (0..n)
                .map(|i| self.add(*a.get(i).unwrap_or(&0), *b.get(i).unwrap_or(&0)))
                .collect(),
        )
    }

    fn psub(self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let n = a.len().max(b.len());
        self.trim(
            (0..n)
                .map(|i| self.sub(*a.get(i).unwrap_or(&0), *b.get(i).unwrap_or(&0)))
                .collect(),
        )
    }

    fn pmul(self, a: &[u64], b: &[u64]) -> Vec<u64> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut c = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                c[i + j] = self.add(c[i + j], self.mul(x, y));
            }
        }
        self.trim(c)
    }

    fn pdivrem(self, a: &[u64], d: &[u64]) -> (Vec<u64>, Vec<u64>) {
        assert!(!d.is_empty());
        let mut r = a.to_vec();
        if r.len() < d.len() {
            return (Vec::new(), self.trim(r));
        }
        let inv = self.inv(*d.last().unwrap());
        let dd = d.len() - 1;
        let mut q = vec![0u64; r.len() - dd];
        for k in (0..q.len()).rev() {
            let c = self.mul(r[k + dd], inv);
            if c != 0 {
                for (j, &dc) in d.iter().enumerate() {
                    r[k + j] = self.sub(r[k + j], self.mul(c, dc));
                }
            }
            q[k] = c;
        }
        r.truncate(dd);
        (self.trim(q), self.trim(r))
    }

    fn prem(self, a: &[u64], d: &[u64]) -> Vec<u64> {
        self.pdivrem(a, d).1
    }

    fn monic(self, a: &[u64]) -> Vec<u64> {
        match a.last() {
            None => Vec::new(),
            Some(&l) => {
                let inv = self.inv(l);
                a.iter().map(|&x| self.mul(x, inv)).collect()
            }
        }
    }

    fn pgcd(self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let (mut a, mut b) = (self.trim(a.to_vec()), self.trim(b.to_vec()));
        while !b.is_empty() {
            let r = self.prem(&a, &b);
            a = b;
            b = r;
        }
        self.monic(&a)
    }

    /// Returns `(g, s, t)` with `s a + t b = g`, `g` monic.
    fn pext_gcd(self, a: &[u64], b: &[u64]) -> (Vec<u64>, Vec<u64>, Vec<u64>) {
        let (mut r0, mut r1) = (self.trim(a.to_vec()), self.trim(b.to_vec()));
        let (mut s0, mut s1) = (vec![1u64], Vec::new());
        let (mut t0, mut t1) = (Vec::new(), vec![1u64]);
        while !r1.is_empty() {
            let (q, r) = self.pdivrem(&r0, &r1);
            let s2 = self.psub(&s0, &self.pmul(&q, &s1));
            let t2 = self.psub(&t0, &self.pmul(&q, &t1));
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s2;
            t0 = t1;
            t1 = t2;
        }
        let inv = self.inv(*r0.last().unwrap());
        let sc = |v: &[u64]| self.trim(v.iter().map(|&x| self.mul(x, inv)).collect());
        (sc(&r0), sc(&s0), sc(&t0))
    }

    fn ppowmod(self, base: &[u64], exp: &BigUint, m: &[u64]) -> Vec<u64> {
        let mut result = vec![1u64];
        let base = self.prem(base, m);
        for i in (0..exp.bits()).rev() {
            result = self.prem(&self.pmul(&result, &result), m);
            if exp.bit(i) {
                result = self.prem(&self.pmul(&result, &base), m);
            }
        }
        self.prem(&result, m)
    }

    fn derivative(self, a: &[u64]) -> Vec<u64> {
        self.trim(
            a.iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| self.mul(c, i as u64 % self.0))
                .collect(),
        )
    }

    /// Factors a monic square-free polynomial into monic irreducibles.
    fn factor_squarefree(self, f: &[u64], rng: &mut ChaCha8Rng) -> Vec<Vec<u64>> {
        let mut out = Vec::new();
        let mut rest = f.to_vec();
        let x = vec![0u64, 1];
        let mut h = x.clone();
        let p_big = BigUint::from(self.0);
        let mut d = 1usize;
        while rest.len() > 1 && 2 * d <= rest.len() - 1 {
            h = self.ppowmod(&h, &p_big, &rest);
            let g = self.pgcd(&self.psub(&h, &x), &rest);
            if g.len() > 1 {
                self.equal_degree(&g, d, rng, &mut out);
                rest = self.pdivrem(&rest, &g).0;
                h = self.prem(&h, &rest);
            }
            d += 1;
        }
        if rest.len() > 1 {
            out.push(self.monic(&rest));
        }
        out
    }

    fn equal_degree(self, g: &[u64], d: usize, rng: &mut ChaCha8Rng, out: &mut Vec<Vec<u64>>) {
        let n = g.len() - 1;
        if n == d {
            out.push(self.monic(g));
            return;
        }
        let exp = (BigUint::from(self.0).pow(d as u32) - 1u32) / 2u32;
        loop {
            let a: Vec<u64> = self.trim((0..n).map(|_| rng.gen_range(0..self.0)).collect());
            if a.len() < 2 {
                continue;
            }
            let b = self.psub(&self.ppowmod(&a, &exp, g), &[1]);
            let c = self.pgcd(&b, g);
            if c.len() > 1 && c.len() < g.len() {
                let other = self.pdivrem(g, &c).0;
                self.equal_degree(&c, d, rng, out);
                self.equal_degree(&other, d, rng, out);
                return;
            }
        }
    }
}

fn small_primes() -> impl Iterator<Item = u64> {
    (3u64..).filter(|&n| (2..).take_while(|k| k * k <= n).all(|k| n % k != 0))
}

// ---------- Hensel lifting over Z / p^k ----------

fn mod_poly(p: &[BigInt], m: &BigInt) -> ZPoly {
    ztrim(p.iter().map(|c| c.mod_floor(m)).collect())
}

fn to_z(p: &[u64]) -> ZPoly {
    p.iter().map(|&c| BigInt::from(c)).collect()
}

/// Lifts `f = lc * u * w (mod p)` to `f = lc * U * W (mod p^k)` with `U`, `W` monic.
fn hensel_pair(f: &[BigInt], lc: &BigInt, u: &[u64], w: &[u64], fp: Fp, k: u32) -> (ZPoly, ZPoly) {
    let p = BigInt::from(fp.0);
    let (g, s, t) = fp.pext_gcd(u, w);
    debug_assert_eq!(g, vec![1]);
    let lc_inv = fp.inv(lc.mod_floor(&p).to_u64().unwrap());
    let mut big_u = to_z(u);
    let mut big_w = to_z(w);
    let mut pj = p.clone();
    let modulus = p.pow(k);
    for _ in 1..k {
        let prod: ZPoly = zmul(&zmul(&big_u, &big_w), &[lc.clone()]);
        let diff: ZPoly = (0..f.len().max(prod.len()))
            .map(|i| {
                let a = f.get(i).cloned().unwrap_or_default();
                let b = prod.get(i).cloned().unwrap_or_default();
                (a - b).mod_floor(&modulus)
            })
            .collect();
        let e: Vec<BigInt> = diff.iter().map(|c| c / &pj).collect();
        let e = fp.reduce(&e);
        let e = fp.trim(e.iter().map(|&c| fp.mul(c, lc_inv)).collect());
        // t*e = q*u + a ; du = a ; dw = s*e + q*w
        let (q, a) = fp.pdivrem(&fp.pmul(&t, &e), u);
        let dw = fp.padd(&fp.pmul(&s, &e), &fp.pmul(&q, w));
        let du = a;
        let add = |base: &mut ZPoly, delta: &[u64]| {
            if base.len() < delta.len() {
                base.resize(delta.len(), BigInt::zero());
            }
            for (i, &c) in delta.iter().enumerate() {
                base[i] = (&base[i] + &pj * BigInt::from(c)).mod_floor(&modulus);
            }
        };
        add(&mut big_u, &du);
        add(&mut big_w, &dw);
        pj *= &p;
    }
    (mod_poly(&big_u, &modulus), mod_poly(&big_w, &modulus))
}

fn hensel_multi(f: &[BigInt], lc: &BigInt, factors: &[Vec<u64>], fp: Fp, k: u32) -> Vec<ZPoly> {
    if factors.len() == 1 {
        // f = lc * F (mod p^k) with F monic
        let m = BigInt::from(fp.0).pow(k);
        let inv = lc.modinv(&m).expect("leading coefficient is a unit mod p");
        return vec![mod_poly(&f.iter().map(|c| c * &inv).collect::<Vec<_>>(), &m)];
    }
    let mid = factors.len() / 2;
    let u = factors[..mid]
        .iter()
        .fold(vec![1u64], |acc, g| fp.pmul(&acc, g));
    let w = factors[mid..]
        .iter()
        .fold(vec![1u64], |acc, g| fp.pmul(&acc, g));
    let (big_u, big_w) = hensel_pair(f, lc, &u, &w, fp, k);
    let one = BigInt::one();
    let mut out = hensel_multi(&big_u, &one, &factors[..mid], fp, k);
    out.extend(hensel_multi(&big_w, &one, &factors[mid..], fp, k));
    out
}

fn symmetric(p: &[BigInt], m: &BigInt) -> ZPoly {
    let half = m / 2;
    ztrim(
        p.iter()
            .map(|c| {
                let c = c.mod_floor(m);
                if c > half {
                    c - m
                } else {
                    c
                }
            })
            .collect(),
    )
}

fn for_each_subset(n: usize, size: usize, f: &mut dyn FnMut(&[usize]) -> bool) -> bool {
    fn rec(start: usize, n: usize, size: usize, cur: &mut Vec<usize>, f: &mut dyn FnMut(&[usize]) -> bool) -> bool {
        if cur.len() == size {
            return f(cur);
        }
        for i in start..n {
            cur.push(i);
            if rec(i + 1, n, size, cur, f) {
                return true;
            }
            cur.pop();
        }
        false
    }
    rec(0, n, size, &mut Vec::new(), f)
}

/// Factors a primitive square-free integer polynomial of degree >= 2 with positive leading coefficient.
fn zassenhaus(g: &[BigInt]) -> Vec<ZPoly> {
    let n = g.len() - 1;
    let lc = g[n].clone();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);

    // pick the good prime (among the first few) with the fewest modular factors
    let mut best: Option<(Fp, Vec<Vec<u64>>)> = None;
    let mut tried = 0;
    for p in small_primes() {
        let fp = Fp(p);
        if (&lc % BigInt::from(p)).is_zero() {
            continue;
        }
        let gm = fp.reduce(g);
        if fp.pgcd(&gm, &fp.derivative(&gm)).len() != 1 {
            continue;
        }
        let facs = fp.factor_squarefree(&fp.monic(&gm), &mut rng);
        if best.as_ref().map_or(true, |(_, b)| facs.len() < b.len()) {
            best = Some((fp, facs));
        }
        tried += 1;
        if tried >= 5 || best.as_ref().is_some_and(|(_, b)| b.len() == 1) {
            break;
        }
    }
    let (fp, mod_factors) = best.expect("some prime is good for a square-free polynomial");
    if mod_factors.len() == 1 {
        return vec![g.to_vec()];
    }

    // coefficient bound for factors of g, times lc
    let norm = g.iter().map(|c| c.abs()).max().unwrap();
    let sqrt_n1 = BigInt::from(((n + 1) as f64).sqrt().ceil() as u64);
    let bound = BigInt::from(2) * &lc * (BigInt::one() << n) * sqrt_n1 * norm * &lc;
    let p = BigInt::from(fp.0);
    let mut k = 1u32;
    let mut pk = p.clone();
    while pk <= bound {
        pk *= &p;
        k += 1;
    }
    let lifted = hensel_multi(g, &lc, &mod_factors, fp, k);

    let mut remaining: Vec<ZPoly> = lifted;
    let mut f = g.to_vec();
    let mut out = Vec::new();
    let mut size = 1;
    while 2 * size <= remaining.len() {
        let mut found: Option<(Vec<usize>, ZPoly, ZPoly)> = None;
        let flc = f.last().unwrap().clone();
        for_each_subset(remaining.len(), size, &mut |idx| {
            let mut prod = vec![flc.clone()];
            for &i in idx {
                prod = mod_poly(&zmul(&prod, &remaining[i]), &pk);
            }
            let cand = primitive_part(&symmetric(&prod, &pk));
            if let Some(q) = zdiv_exact(&f, &cand) {
                found = Some((idx.to_vec(), cand, q));
                return true;
            }
            false
        });
        match found {
            Some((idx, cand, q)) => {
                out.push(cand);
                f = q;
                remaining = remaining
                    .into_iter()
                    .enumerate()
                    .filter(|(i, _)| !idx.contains(i))
                    .map(|(_, r)| r)
                    .collect();
            }
            None => size += 1,
        }
    }
    out.push(primitive_part(&f));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(c: &[i64]) -> RatPoly {
        RatPoly::from_i64(c)
    }

    fn expand(fs: &[(RatPoly, usize)]) -> RatPoly {
        fs.iter()
            .fold(RatPoly::one(), |acc, (f, m)| acc.mul(&f.pow(*m)))
    }

    #[test]
    fn factor_examples() {
        let f = factor_poly(&poly(&[-1, 0, 0, 0, 1]));
        assert_eq!(
            f,
            vec![(poly(&[-1, 1]), 1), (poly(&[1, 1]), 1), (poly(&[1, 0, 1]), 1)]
        );
        assert_eq!(factor_poly(&poly(&[1, -3, 1])), vec![(poly(&[1, -3, 1]), 1)]);
        assert_eq!(factor_poly(&poly(&[1, -2, 1])), vec![(poly(&[-1, 1]), 2)]);
    }

    #[test]
    fn swinnerton_dyer_like_cases() {
        // x^4 - 10x^2 + 1 is irreducible over Q but splits modulo every prime
        assert!(is_irreducible(&poly(&[1, 0, -10, 0, 1])));
        // x^4 + 4 = (x^2 + 2x + 2)(x^2 - 2x + 2)
        let f = factor_poly(&poly(&[4, 0, 0, 0, 1]));
        assert_eq!(f, vec![(poly(&[2, -2, 1]), 1), (poly(&[2, 2, 1]), 1)]);
    }

    #[test]
    fn non_monic_and_rational_input() {
        // (2x - 1)(3x + 1)(x^2 + x + 1) / 5
        let p = poly(&[-1, 2])
            .mul(&poly(&[1, 3]))
            .mul(&poly(&[1, 1, 1]))
            .scale(&crate::linalg::rational::ratio(1, 5));
        let f = factor_poly(&p);
        assert_eq!(f.len(), 3);
        assert_eq!(expand(&f), p.monic());
        assert!(f.iter().all(|(g, _)| g.is_monic()));
    }

    #[test]
    fn larger_degree_round_trip() {
        // cyclotomic pieces of x^12 - 1 times a shifted cubic
        let p = poly(&[-1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1]).mul(&poly(&[-2, 0, 0, 1]));
        let f = factor_poly(&p);
        assert_eq!(expand(&f), p);
        let degrees: Vec<usize> = f.iter().map(|(g, _)| g.deg()).collect();
        assert_eq!(degrees, vec![1, 1, 2, 2, 2, 3, 4]);
    }
}
