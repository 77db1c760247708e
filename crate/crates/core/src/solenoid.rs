//! The solenoid `S_a^d`: affine generators, characters in `Z[1/a]^d`, pairings and annihilators.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{ParseError, SolenoidError};
use crate::linalg::lattice::integer_kernel;
use crate::linalg::matrix::{RatMatrix, RatVector};
use crate::linalg::rational::{format_rational, frac, parse_rational, primitive_integer_vector, Rational};
use crate::module::Submodule;
use crate::numfield::integers::factor_integer;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SolenoidSpec {
    pub d: usize,
    pub a: u64,
    pub primes: Vec<u64>,
}

impl SolenoidSpec {
    pub fn new(a: u64, d: usize) -> Result<Self, SolenoidError> {
        if a == 0 {
            return Err(SolenoidError::NotSquareFree(a));
        }
        if d == 0 {
            return Err(SolenoidError::ZeroDimension);
        }
        let mut primes = Vec::new();
        if a > 1 {
            for (p, e) in factor_integer(&BigInt::from(a)) {
                if e > 1 {
                    return Err(SolenoidError::NotSquareFree(a));
                }
                primes.push(p.to_u64().unwrap());
            }
        }
        Ok(SolenoidSpec { d, a, primes })
    }

    /// Whether every prime in the denominator of `q` divides `a`.
    pub fn admits_denominator(&self, q: &Rational) -> bool {
        let mut den = q.denom().clone();
        for &p in &self.primes {
            let p = BigInt::from(p);
            while (&den % &p).is_zero() {
                den /= &p;
            }
        }
        den.is_one()
    }

    /// Whether `q` is a unit of `Z[1/a]`: numerator and denominator only involve primes of `a`.
    pub fn is_unit(&self, q: &Rational) -> bool {
        if q.is_zero() {
            return false;
        }
        let only_primes_of_a = |x: &BigInt| {
            let mut x = x.abs();
            for &p in &self.primes {
                let p = BigInt::from(p);
                while (&x % &p).is_zero() {
                    x /= &p;
                }
            }
            x.is_one()
        };
        only_primes_of_a(q.numer()) && only_primes_of_a(q.denom())
    }

    /// p-adic fractional part `{t}_p`: the element of `Z[1/p] ∩ [0,1)` with `t - {t}_p` a p-adic integer.
    pub fn padic_frac(t: &Rational, p: u64) -> Rational {
        let p = BigInt::from(p);
        let (n, m) = (t.numer(), t.denom());
        let mut pk = BigInt::one();
        let mut rest = m.clone();
        while (&rest % &p).is_zero() {
            rest /= &p;
            pk *= &p;
        }
        if pk.is_one() {
            return Rational::zero();
        }
        // t = A / p^k + B / rest with A = n * rest^{-1} mod p^k
        let inv = rest.mod_floor(&pk).modinv(&pk).expect("coprime");
        let a = (n * inv).mod_floor(&pk);
        Rational::new(a, pk)
    }

    /// Sum of the p-adic fractional parts over the primes of `a`.
    fn adic_part(&self, t: &Rational) -> Rational {
        self.primes
            .iter()
            .fold(Rational::zero(), |acc, &p| acc + Self::padic_frac(t, p))
    }

    /// Canonical representative of a translation coordinate: `Z[1/a]`-part removed, result in `[0,1)`.
    pub fn canonical_coordinate(&self, q: &Rational) -> Rational {
        frac(&(q - self.adic_part(q)))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AffineGen {
    pub matrix: RatMatrix,
    pub translation: RatVector,
}

impl AffineGen {
    pub fn linear(matrix: RatMatrix) -> Self {
        let d = matrix.rows();
        AffineGen {
            matrix,
            translation: vec![Rational::zero(); d],
        }
    }

    pub fn identity(d: usize) -> Self {
        Self::linear(RatMatrix::identity(d))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Character {
    pub vector: RatVector,
}

impl Character {
    pub fn new(vector: RatVector) -> Self {
        Character { vector }
    }

    pub fn is_zero(&self) -> bool {
        self.vector.iter().all(Zero::is_zero)
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.vector.iter().map(format_rational).collect()
    }

    pub fn from_strings(v: &[String]) -> Option<Self> {
        let v: Option<RatVector> = v.iter().map(|s| parse_rational(s).ok()).collect();
        v.map(Character::new)
    }
}

/// A rational angle in `[0, 1)`; the character value is `exp(2 pi i angle)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PhaseAngle(pub Rational);

impl PhaseAngle {
    pub fn to_f64_pair(&self) -> (f64, f64) {
        let x = 2.0 * std::f64::consts::PI * crate::linalg::rational::to_f64(&self.0);
        (x.cos(), x.sin())
    }
}

/// Checks generators against the spec and canonicalizes translations.
pub fn validate(spec: &SolenoidSpec, gens: &[AffineGen]) -> Result<Vec<AffineGen>, SolenoidError> {
    let d = spec.d;
    let mut out = Vec::with_capacity(gens.len());
    for (index, g) in gens.iter().enumerate() {
        if g.matrix.rows() != d || g.matrix.cols() != d {
            return Err(SolenoidError::Shape {
                index,
                what: "matrix",
                found: format!("{}x{}", g.matrix.rows(), g.matrix.cols()),
                expected: format!("{d}x{d}"),
            });
        }
        if g.translation.len() != d {
            return Err(SolenoidError::Shape {
                index,
                what: "translation",
                found: g.translation.len().to_string(),
                expected: d.to_string(),
            });
        }
        if let Some(bad) = g.matrix.entries().iter().find(|x| !spec.admits_denominator(x)) {
            return Err(SolenoidError::BadDenominator {
                index,
                entry: format_rational(bad),
            });
        }
        let det = g.matrix.determinant();
        if !spec.is_unit(&det) {
            return Err(SolenoidError::NotAUnit {
                index,
                det: format_rational(&det),
            });
        }
        out.push(AffineGen {
            matrix: g.matrix.clone(),
            translation: g.translation.iter().map(|q| spec.canonical_coordinate(q)).collect(),
        });
    }
    Ok(out)
}

/// `matrix^t chi`.
pub fn dual_apply(g: &AffineGen, chi: &Character) -> Character {
    Character::new(g.matrix.transpose().mul_vec(&chi.vector))
}

/// Value of `chi` at the diagonal rational point `q`, as an angle.
pub fn pairing_phase(chi: &Character, q: &[Rational], spec: &SolenoidSpec) -> PhaseAngle {
    let t: Rational = chi
        .vector
        .iter()
        .zip(q)
        .fold(Rational::zero(), |acc, (x, y)| acc + x * y);
    PhaseAngle(frac(&(&t - spec.adic_part(&t))))
}

/// `g ∘ h` as maps of the solenoid.
pub fn affine_compose(spec: &SolenoidSpec, g: &AffineGen, h: &AffineGen) -> AffineGen {
    let moved = g.matrix.mul_vec(&h.translation);
    AffineGen {
        matrix: &g.matrix * &h.matrix,
        translation: g
            .translation
            .iter()
            .zip(&moved)
            .map(|(x, y)| spec.canonical_coordinate(&(x + y)))
            .collect(),
    }
}

/// A `Z[1/a]`-basis of `W ∩ Z[1/a]^d`, given as primitive integer vectors in Hermite normal form.
pub fn annihilator_lattice(w: &Submodule, _spec: &SolenoidSpec) -> Vec<Character> {
    let d = w.ambient_dim();
    if w.is_zero() {
        return Vec::new();
    }
    let perp = w.annihilator();
    let rows: Vec<Vec<BigInt>> = perp.basis().iter().map(|v| primitive_integer_vector(v)).collect();
    let basis = if rows.is_empty() {
        (0..d)
            .map(|i| (0..d).map(|j| BigInt::from((i == j) as i64)).collect())
            .collect()
    } else {
        integer_kernel(&rows, &[], d)
    };
    basis
        .into_iter()
        .map(|v| Character::new(v.into_iter().map(Rational::from_integer).collect()))
        .collect()
}

// ---------- JSON problem input ----------

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(untagged)]
pub enum RationalRepr {
    Text(String),
    Int(i64),
}

impl RationalRepr {
    fn parse(&self) -> Result<Rational, ParseError> {
        match self {
            RationalRepr::Text(s) => parse_rational(s),
            RationalRepr::Int(n) => Ok(Rational::from_integer(BigInt::from(*n))),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct GeneratorJson {
    pub matrix: Vec<Vec<RationalRepr>>,
    #[serde(default)]
    pub translation: Option<Vec<RationalRepr>>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct ProblemJson {
    pub a: u64,
    pub d: usize,
    pub generators: Vec<GeneratorJson>,
}

impl GeneratorJson {
    pub fn from_gen(g: &AffineGen) -> Self {
        GeneratorJson {
            matrix: g
                .matrix
                .to_strings()
                .into_iter()
                .map(|r| r.into_iter().map(RationalRepr::Text).collect())
                .collect(),
            translation: Some(g.translation.iter().map(|q| RationalRepr::Text(format_rational(q))).collect()),
        }
    }
}

impl ProblemJson {
    pub fn from_parts(spec: &SolenoidSpec, gens: &[AffineGen]) -> Self {
        ProblemJson {
            a: spec.a,
            d: spec.d,
            generators: gens.iter().map(GeneratorJson::from_gen).collect(),
        }
    }

    /// Parses shapes and rationals; does not validate the group-theoretic conditions.
    pub fn to_parts(&self) -> Result<(SolenoidSpec, Vec<AffineGen>), crate::error::Error> {
        let spec = SolenoidSpec::new(self.a, self.d)?;
        let d = self.d;
        let mut gens = Vec::with_capacity(self.generators.len());
        for (i, g) in self.generators.iter().enumerate() {
            let field = |what: &str| format!("generators[{i}].{what}");
            if g.matrix.len() != d || g.matrix.iter().any(|r| r.len() != d) {
                return Err(ParseError::Field {
                    field: field("matrix"),
                    reason: format!("expected a {d}x{d} matrix"),
                }
                .into());
            }
            let mut data = Vec::with_capacity(d * d);
            for (r, row) in g.matrix.iter().enumerate() {
                for (c, x) in row.iter().enumerate() {
                    data.push(x.parse().map_err(|e| ParseError::Field {
                        field: field(&format!("matrix[{r}][{c}]")),
                        reason: e.to_string(),
                    })?);
                }
            }
            let translation = match &g.translation {
                None => vec![Rational::zero(); d],
                Some(t) => {
                    if t.len() != d {
                        return Err(ParseError::Field {
                            field: field("translation"),
                            reason: format!("expected {d} entries, found {}", t.len()),
                        }
                        .into());
                    }
                    let mut v = Vec::with_capacity(d);
                    for (k, x) in t.iter().enumerate() {
                        v.push(x.parse().map_err(|e| ParseError::Field {
                            field: field(&format!("translation[{k}]")),
                            reason: e.to_string(),
                        })?);
                    }
                    v
                }
            };
            gens.push(AffineGen {
                matrix: RatMatrix::from_vec(d, d, data),
                translation,
            });
        }
        Ok((spec, gens))
    }
}

/// Parses and validates a JSON problem description.
pub fn parse_problem(text: &str) -> Result<(SolenoidSpec, Vec<AffineGen>), crate::error::Error> {
    let p: ProblemJson = serde_json::from_str(text).map_err(|e| ParseError::Json(e.to_string()))?;
    let (spec, gens) = p.to_parts()?;
    let gens = validate(&spec, &gens)?;
    Ok((spec, gens))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rational::{rat, ratio};

    fn spec(a: u64, d: usize) -> SolenoidSpec {
        SolenoidSpec::new(a, d).unwrap()
    }

    #[test]
    fn validation_examples() {
        let cat = AffineGen::linear(RatMatrix::from_i64(&[&[2, 1], &[1, 1]]));
        assert!(validate(&spec(1, 2), &[cat]).is_ok());
        let two = AffineGen::linear(RatMatrix::from_i64(&[&[2]]));
        assert!(validate(&spec(2, 1), &[two.clone()]).is_ok());
        assert!(matches!(
            validate(&spec(1, 1), &[two]),
            Err(SolenoidError::NotAUnit { index: 0, .. })
        ));
        assert_eq!(SolenoidSpec::new(12, 1), Err(SolenoidError::NotSquareFree(12)));
        let half = AffineGen::linear(RatMatrix::diagonal(&[ratio(1, 3)]));
        assert!(matches!(
            validate(&spec(2, 1), &[half]),
            Err(SolenoidError::BadDenominator { .. })
        ));
    }

    #[test]
    fn dual_apply_examples() {
        let t = AffineGen::linear(RatMatrix::from_i64(&[&[1, 1], &[0, 1]]));
        let chi = Character::new(vec![rat(1), rat(0)]);
        assert_eq!(dual_apply(&t, &chi).vector, vec![rat(1), rat(1)]);
        let zero = Character::new(vec![rat(0), rat(0)]);
        assert!(dual_apply(&t, &zero).is_zero());
        let two = AffineGen::linear(RatMatrix::from_i64(&[&[2]]));
        assert_eq!(dual_apply(&two, &Character::new(vec![ratio(1, 2)])).vector, vec![rat(1)]);
    }

    #[test]
    fn pairing_examples() {
        let s1 = spec(1, 2);
        let chi = Character::new(vec![rat(1), rat(0)]);
        assert_eq!(pairing_phase(&chi, &[ratio(1, 3), rat(0)], &s1).0, ratio(1, 3));
        let s2 = spec(2, 1);
        assert_eq!(pairing_phase(&Character::new(vec![ratio(3, 2)]), &[ratio(1, 3)], &s2).0, rat(0));
        assert_eq!(pairing_phase(&Character::new(vec![rat(1)]), &[ratio(1, 3)], &s2).0, ratio(1, 3));
    }

    #[test]
    fn compose_examples() {
        let s = spec(1, 1);
        let rot = AffineGen {
            matrix: RatMatrix::identity(1),
            translation: vec![ratio(1, 3)],
        };
        assert_eq!(affine_compose(&s, &rot, &rot).translation, vec![ratio(2, 3)]);
        let neg = AffineGen::linear(RatMatrix::from_i64(&[&[-1]]));
        let c = affine_compose(&s, &neg, &rot);
        assert_eq!(c.matrix, RatMatrix::from_i64(&[&[-1]]));
        assert_eq!(c.translation, vec![ratio(2, 3)]);
        assert_eq!(affine_compose(&s, &AffineGen::identity(1), &rot), rot);
        assert_eq!(s.canonical_coordinate(&ratio(1, 2)), ratio(1, 2));
        assert_eq!(spec(2, 1).canonical_coordinate(&ratio(1, 6)), ratio(2, 3));
    }

    #[test]
    fn annihilator_examples() {
        let s = spec(1, 2);
        let line = Submodule::span(2, &[vec![rat(1), rat(0)]]);
        assert_eq!(annihilator_lattice(&line, &s), vec![Character::new(vec![rat(1), rat(0)])]);
        let full = Submodule::full(2);
        assert_eq!(annihilator_lattice(&full, &s).len(), 2);
        let diag = Submodule::span(2, &[vec![ratio(1, 2), ratio(1, 2)]]);
        assert_eq!(annihilator_lattice(&diag, &s), vec![Character::new(vec![rat(1), rat(1)])]);
    }

    #[test]
    fn problem_json_round_trip() {
        let text = r#"{"a": 1, "d": 2, "generators": [{"matrix": [["2","1"],["1","1"]], "translation": ["1/3", "0"]}]}"#;
        let (s, g) = parse_problem(text).unwrap();
        assert_eq!(s.d, 2);
        assert_eq!(g[0].translation, vec![ratio(1, 3), rat(0)]);
        let back = serde_json::to_string(&ProblemJson::from_parts(&s, &g)).unwrap();
        assert_eq!(parse_problem(&back).unwrap(), (s, g));
        let bad = r#"{"a": 1, "d": 2, "generators": [{"matrix": [["2","x"],["1","1"]]}]}"#;
        let err = parse_problem(bad).unwrap_err().to_string();
        assert!(err.contains("generators[0].matrix[0][1]"), "{err}");
    }
}
