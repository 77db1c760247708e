//! Finite truncations of the dual Koopman action and power-iteration estimates of the averaging
//! operator. Floating point is confined to this module.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::KoopmanError;
use crate::linalg::rational::Rational;
use crate::solenoid::{pairing_phase, AffineGen, Character, ProblemJson, SolenoidSpec};

/// Upper limit on the number of characters in one truncation.
pub const DEFAULT_CHARACTER_CAP: usize = 4_000_000;

const CHUNK: usize = 4096;

/// Characters `v / a^j` with `|v_i| <= height` and `j <= power`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Truncation {
    pub height: u64,
    pub power: u32,
}

impl Truncation {
    pub fn new(height: u64, power: u32) -> Result<Self, KoopmanError> {
        if height == 0 {
            return Err(KoopmanError::EmptyTruncation);
        }
        Ok(Truncation { height, power })
    }

    /// For `a = 1` there are no denominators, so the power is forced to 0.
    pub fn normalized(self, spec: &SolenoidSpec) -> Self {
        if spec.a == 1 {
            Truncation { power: 0, ..self }
        } else {
            self
        }
    }

    pub fn contains(&self, other: &Truncation) -> bool {
        self.height >= other.height && self.power >= other.power
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectralEstimate {
    pub lambda: f64,
    pub iterations: usize,
    pub residual: f64,
    /// False when the residual was still above the tolerance after the last iteration.
    pub converged: bool,
    pub truncation: Truncation,
    pub characters: usize,
    pub generator_hash: String,
}

/// The compressed action of one generator: `(U xi)(chi_i) = phase_i * xi(image_i)`.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneratorAction {
    pub image: Vec<Option<u32>>,
    pub phase: Vec<Complex64>,
    preimage: Vec<Option<u32>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct KoopmanOperator {
    pub truncation: Truncation,
    /// Numerators over `a^power`.
    scaled: Vec<Vec<i64>>,
    pub actions: Vec<GeneratorAction>,
    denominator: i64,
}

/// `a^k` as `i64`.
fn checked_pow(a: u64, k: u32) -> Result<i64, KoopmanError> {
    i64::try_from(a)
        .ok()
        .and_then(|a| a.checked_pow(k))
        .ok_or(KoopmanError::Overflow)
}

fn to_i64(x: &BigInt) -> Result<i64, KoopmanError> {
    x.to_i64().ok_or(KoopmanError::Overflow)
}

/// Enumerates the truncation in (denominator exponent, height, lexicographic) order.
fn enumerate(spec: &SolenoidSpec, trunc: &Truncation, cap: usize) -> Result<Vec<Vec<i64>>, KoopmanError> {
    let d = spec.d;
    let h = i64::try_from(trunc.height).map_err(|_| KoopmanError::Overflow)?;
    let side = (2 * trunc.height + 1) as f64;
    let estimate = side.powi(d as i32) * (trunc.power as f64 + 1.0);
    if estimate > cap as f64 {
        return Err(KoopmanError::TruncationTooLarge {
            count: estimate.min(usize::MAX as f64) as usize,
            cap,
        });
    }
    let a = spec.a as i64;
    let top = checked_pow(spec.a, trunc.power)?;
    let mut boxed: Vec<(i64, Vec<i64>)> = Vec::new();
    let mut v = vec![-h; d];
    'odometer: loop {
        let height = v.iter().map(|x| x.abs()).max().unwrap();
        if height > 0 {
            boxed.push((height, v.clone()));
        }
        for i in (0..d).rev() {
            if v[i] < h {
                v[i] += 1;
                continue 'odometer;
            }
            v[i] = -h;
        }
        break;
    }
    boxed.sort();
    let mut out = Vec::new();
    for j in 0..=trunc.power {
        let scale = top / checked_pow(spec.a, j)?;
        for (_, v) in &boxed {
            // v / a^j is in lowest terms over powers of a unless a divides every entry
            if j > 0 && v.iter().all(|x| x % a == 0) {
                continue;
            }
            let w: Option<Vec<i64>> = v.iter().map(|x| x.checked_mul(scale)).collect();
            out.push(w.ok_or(KoopmanError::Overflow)?);
        }
    }
    Ok(out)
}

/// Integer matrix `N` and denominator `q` with `g^t = N / q`.
fn scaled_transpose(g: &AffineGen) -> Result<(Vec<Vec<i64>>, i64), KoopmanError> {
    let t = g.matrix.transpose();
    let mut q = BigInt::from(1);
    for x in t.entries() {
        q = q.lcm(x.denom());
    }
    let mut rows = Vec::new();
    for i in 0..t.rows() {
        let mut row = Vec::new();
        for j in 0..t.cols() {
            let x = &t[(i, j)];
            row.push(to_i64(&(x.numer() * (&q / x.denom())))?);
        }
        rows.push(row);
    }
    Ok((rows, to_i64(&q)?))
}

fn apply_scaled(n: &[Vec<i64>], q: i64, w: &[i64]) -> Option<Vec<i64>> {
    n.iter()
        .map(|row| {
            let s: i128 = row.iter().zip(w).map(|(a, b)| *a as i128 * *b as i128).sum();
            if s % q as i128 != 0 {
                return None;
            }
            i64::try_from(s / q as i128).ok()
        })
        .collect()
}

pub fn build_operator(spec: &SolenoidSpec, gens: &[AffineGen], trunc: Truncation) -> Result<KoopmanOperator, KoopmanError> {
    build_operator_capped(spec, gens, trunc, DEFAULT_CHARACTER_CAP)
}

pub fn build_operator_capped(
    spec: &SolenoidSpec,
    gens: &[AffineGen],
    trunc: Truncation,
    cap: usize,
) -> Result<KoopmanOperator, KoopmanError> {
    if trunc.height == 0 {
        return Err(KoopmanError::EmptyTruncation);
    }
    let trunc = trunc.normalized(spec);
    let scaled = enumerate(spec, &trunc, cap)?;
    let denominator = checked_pow(spec.a, trunc.power)?;
    let index: HashMap<&[i64], u32> = scaled
        .iter()
        .enumerate()
        .map(|(i, w)| (w.as_slice(), i as u32))
        .collect();
    let mut actions = Vec::with_capacity(gens.len());
    for g in gens {
        let (n, q) = scaled_transpose(g)?;
        let image: Vec<Option<u32>> = scaled
            .par_iter()
            .map(|w| apply_scaled(&n, q, w).and_then(|x| index.get(x.as_slice()).copied()))
            .collect();
        let phase: Vec<Complex64> = if g.translation.iter().all(Zero::is_zero) {
            vec![Complex64::new(1.0, 0.0); scaled.len()]
        } else {
            scaled
                .par_iter()
                .map(|w| {
                    let chi = Character::new(
                        w.iter()
                            .map(|x| Rational::new(BigInt::from(*x), BigInt::from(denominator)))
                            .collect(),
                    );
                    let (re, im) = pairing_phase(&chi, &g.translation, spec).to_f64_pair();
                    Complex64::new(re, im)
                })
                .collect()
        };
        let mut preimage = vec![None; scaled.len()];
        for (i, t) in image.iter().enumerate() {
            if let Some(t) = t {
                preimage[*t as usize] = Some(i as u32);
            }
        }
        actions.push(GeneratorAction { image, phase, preimage });
    }
    Ok(KoopmanOperator {
        truncation: trunc,
        scaled,
        actions,
        denominator,
    })
}

impl KoopmanOperator {
    pub fn len(&self) -> usize {
        self.scaled.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scaled.is_empty()
    }

    pub fn character(&self, i: usize) -> Character {
        Character::new(
            self.scaled[i]
                .iter()
                .map(|x| Rational::new(BigInt::from(*x), BigInt::from(self.denominator)))
                .collect(),
        )
    }

    pub fn characters(&self) -> Vec<Character> {
        (0..self.len()).map(|i| self.character(i)).collect()
    }

    /// `A x` with `A = (1/2m) sum (U_g + U_g^*)`, each output entry gathered in a fixed order.
    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        let m = self.actions.len();
        let w = 1.0 / (2.0 * m as f64);
        (0..self.len())
            .into_par_iter()
            .with_min_len(CHUNK)
            .map(|j| {
                let mut s = Complex64::new(0.0, 0.0);
                for act in &self.actions {
                    if let Some(t) = act.image[j] {
                        s += act.phase[j] * x[t as usize];
                    }
                    if let Some(p) = act.preimage[j] {
                        s += act.phase[p as usize].conj() * x[p as usize];
                    }
                }
                s * w
            })
            .collect()
    }

    /// Dense compressed matrix, for small truncations.
    pub fn dense(&self) -> Vec<Vec<Complex64>> {
        let n = self.len();
        (0..n)
            .map(|j| {
                let mut e = vec![Complex64::new(0.0, 0.0); n];
                e[j] = Complex64::new(1.0, 0.0);
                let col = self.apply(&e);
                col
            })
            .collect::<Vec<_>>()
            .into_iter()
            .enumerate()
            .fold(vec![vec![Complex64::new(0.0, 0.0); n]; n], |mut acc, (j, col)| {
                for (i, v) in col.into_iter().enumerate() {
                    acc[i][j] = v;
                }
                acc
            })
    }
}

/// `<x, y>` summed in fixed-size blocks, then across blocks in order.
fn dot(x: &[Complex64], y: &[Complex64]) -> Complex64 {
    let partial: Vec<Complex64> = x
        .par_chunks(CHUNK)
        .zip(y.par_chunks(CHUNK))
        .map(|(a, b)| a.iter().zip(b).fold(Complex64::new(0.0, 0.0), |s, (p, q)| s + p.conj() * q))
        .collect();
    partial.into_iter().fold(Complex64::new(0.0, 0.0), |s, p| s + p)
}

fn norm(x: &[Complex64]) -> f64 {
    dot(x, x).re.sqrt()
}

/// Uniform on the lowest shell, plus a small fixed perturbation so no eigenvector is missed.
fn start_vector(op: &KoopmanOperator) -> Vec<Complex64> {
    let low = op.scaled.first().map(|w| w.iter().map(|x| x.abs()).max().unwrap()).unwrap_or(0);
    let mut x: Vec<Complex64> = op
        .scaled
        .iter()
        .enumerate()
        .map(|(i, w)| {
            let on_shell = w.iter().map(|x| x.abs()).max().unwrap() == low;
            // deterministic small perturbation from a multiplicative hash of the index
            let h = ((i as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15) >> 11) as f64 / (1u64 << 53) as f64;
            Complex64::new(if on_shell { 1.0 } else { 0.0 } + 1e-3 * h, 0.0)
        })
        .collect();
    let n = norm(&x);
    x.iter_mut().for_each(|v| *v /= n);
    x
}

pub fn generator_hash(spec: &SolenoidSpec, gens: &[AffineGen]) -> String {
    let text = serde_json::to_string(&ProblemJson::from_parts(spec, gens)).expect("serializable");
    hex::encode(&Sha256::digest(text.as_bytes())[..8])
}

/// Power iteration on `(A + I) / 2`; reports the Rayleigh quotient of `A`.
pub fn estimate_top(
    spec: &SolenoidSpec,
    gens: &[AffineGen],
    trunc: Truncation,
    max_iters: usize,
    tol: f64,
) -> Result<SpectralEstimate, KoopmanError> {
    if gens.is_empty() {
        return Err(KoopmanError::NoGenerators);
    }
    let op = build_operator(spec, gens, trunc)?;
    Ok(estimate_operator(&op, max_iters, tol, generator_hash(spec, gens)))
}

pub fn estimate_operator(op: &KoopmanOperator, max_iters: usize, tol: f64, generator_hash: String) -> SpectralEstimate {
    let mut x = start_vector(op);
    let mut lambda = 0.0;
    let mut residual = f64::INFINITY;
    let mut iterations = 0;
    while iterations < max_iters.max(1) {
        iterations += 1;
        let y = op.apply(&x);
        lambda = dot(&x, &y).re;
        let r: Vec<Complex64> = y.iter().zip(&x).map(|(a, b)| a - b * lambda).collect();
        residual = norm(&r);
        if residual <= tol {
            break;
        }
        let mut z: Vec<Complex64> = y.iter().zip(&x).map(|(a, b)| (a + b) * 0.5).collect();
        let n = norm(&z);
        z.iter_mut().for_each(|v| *v /= n);
        x = z;
    }
    SpectralEstimate {
        lambda,
        iterations,
        residual,
        converged: residual <= tol,
        truncation: op.truncation,
        characters: op.len(),
        generator_hash,
    }
}

/// One estimate per truncation; the truncations must strictly increase.
pub fn gap_curve(
    spec: &SolenoidSpec,
    gens: &[AffineGen],
    truncs: &[Truncation],
    max_iters: usize,
    tol: f64,
) -> Result<Vec<(Truncation, SpectralEstimate)>, KoopmanError> {
    if truncs.is_empty() || truncs.windows(2).any(|w| !w[1].contains(&w[0]) || w[0] == w[1]) {
        return Err(KoopmanError::BadTruncationList);
    }
    truncs
        .iter()
        .map(|t| estimate_top(spec, gens, *t, max_iters, tol).map(|e| (*t, e)))
        .collect()
}

#[derive(Serialize)]
struct CsvRow {
    a: u64,
    d: usize,
    #[serde(rename = "H")]
    h: u64,
    #[serde(rename = "K")]
    k: u32,
    lambda: f64,
    iterations: usize,
    residual: f64,
}

/// CSV with columns `a,d,H,K,lambda,iterations,residual`.
pub fn curve_csv(spec: &SolenoidSpec, rows: &[(Truncation, SpectralEstimate)]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for (_, e) in rows {
        w.serialize(CsvRow {
            a: spec.a,
            d: spec.d,
            h: e.truncation.height,
            k: e.truncation.power,
            lambda: e.lambda,
            iterations: e.iterations,
            residual: e.residual,
        })
        .expect("in-memory CSV");
    }
    String::from_utf8(w.into_inner().expect("in-memory CSV")).expect("UTF-8")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::matrix::RatMatrix;
    use crate::linalg::rational::rat;

    fn lin(rows: &[&[i64]]) -> AffineGen {
        AffineGen::linear(RatMatrix::from_i64(rows))
    }

    #[test]
    fn sign_action() {
        let spec = SolenoidSpec::new(1, 1).unwrap();
        let op = build_operator(&spec, &[lin(&[&[-1]])], Truncation::new(2, 0).unwrap()).unwrap();
        let chars: Vec<Rational> = op.characters().into_iter().map(|c| c.vector[0].clone()).collect();
        assert_eq!(chars, vec![rat(-1), rat(1), rat(-2), rat(2)]);
        assert_eq!(op.actions[0].image, vec![Some(1), Some(0), Some(3), Some(2)]);
        assert!(op.actions[0].phase.iter().all(|p| *p == Complex64::new(1.0, 0.0)));
        let e = estimate_operator(&op, 100, 1e-10, String::new());
        assert!((e.lambda - 1.0).abs() < 1e-9);
    }

    #[test]
    fn rotation_phases() {
        let spec = SolenoidSpec::new(1, 1).unwrap();
        let g = AffineGen {
            matrix: RatMatrix::identity(1),
            translation: vec![Rational::new(1.into(), 3.into())],
        };
        let op = build_operator(&spec, &[g], Truncation::new(1, 0).unwrap()).unwrap();
        assert_eq!(op.actions[0].image, vec![Some(0), Some(1)]);
        let w = 2.0 * std::f64::consts::PI / 3.0;
        // index 0 is chi = -1
        assert!((op.actions[0].phase[0] - Complex64::new(w.cos(), -w.sin())).norm() < 1e-12);
        assert!((op.actions[0].phase[1] - Complex64::new(w.cos(), w.sin())).norm() < 1e-12);
    }

    #[test]
    fn identity_and_errors() {
        let spec = SolenoidSpec::new(2, 2).unwrap();
        let e = estimate_top(&spec, &[AffineGen::identity(2)], Truncation::new(3, 1).unwrap(), 10, 1e-12).unwrap();
        assert!((e.lambda - 1.0).abs() < 1e-12);
        assert!(e.converged);
        assert_eq!(Truncation::new(0, 0), Err(KoopmanError::EmptyTruncation));
        assert_eq!(
            estimate_top(&spec, &[], Truncation::new(1, 0).unwrap(), 10, 1e-9),
            Err(KoopmanError::NoGenerators)
        );
        let too_big = build_operator_capped(&spec, &[], Truncation::new(100, 0).unwrap(), 1000);
        assert!(matches!(too_big, Err(KoopmanError::TruncationTooLarge { .. })));
    }

    #[test]
    fn enumeration_with_denominators() {
        let spec = SolenoidSpec::new(2, 1).unwrap();
        let op = build_operator(&spec, &[lin(&[&[2]])], Truncation::new(2, 1).unwrap()).unwrap();
        let chars: Vec<Rational> = op.characters().into_iter().map(|c| c.vector[0].clone()).collect();
        let half = |n: i64| Rational::new(n.into(), 2.into());
        assert_eq!(chars, vec![rat(-1), rat(1), rat(-2), rat(2), half(-1), half(1)]);
        // chi -> 2 chi: 1/2 -> 1, 1 -> 2, 2 -> 4 (outside)
        assert_eq!(op.actions[0].image, vec![Some(2), Some(3), None, None, Some(0), Some(1)]);
    }

    #[test]
    fn csv_columns() {
        let spec = SolenoidSpec::new(1, 1).unwrap();
        let rows = gap_curve(&spec, &[lin(&[&[-1]])], &[Truncation::new(2, 0).unwrap()], 50, 1e-9).unwrap();
        let text = curve_csv(&spec, &rows);
        assert!(text.starts_with("a,d,H,K,lambda,iterations,residual\n1,1,2,0,"));
        assert_eq!(
            gap_curve(&spec, &[lin(&[&[-1]])], &[], 5, 1e-9),
            Err(KoopmanError::BadTruncationList)
        );
    }
}
