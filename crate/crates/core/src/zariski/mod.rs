//! Lie algebras of Zariski closures of rational matrix groups, and the resulting group classes.

pub mod cyclic;

use std::collections::HashSet;
use std::fmt;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::ZariskiError;
use crate::linalg::matrix::{EchelonBasis, RatMatrix};
use crate::linalg::rational::parse_rational;

pub use cyclic::{jordan_decomposition, log_unipotent, torus_lie};

pub const DEFAULT_ENUMERATION_BOUND: usize = 100_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LieAlgebra {
    pub ambient_dim: usize,
    pub basis: Vec<RatMatrix>,
    pub complete: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LieAlgebraJson {
    pub basis: Vec<Vec<Vec<String>>>,
    pub complete: bool,
}

impl LieAlgebra {
    pub fn zero(n: usize) -> Self {
        LieAlgebra {
            ambient_dim: n,
            basis: Vec::new(),
            complete: true,
        }
    }

    /// Span of the given matrices, in reduced echelon form.
    pub fn span(n: usize, mats: &[RatMatrix], complete: bool) -> Self {
        let e = EchelonBasis::from_vectors(n * n, &mats.iter().map(|m| m.flatten()).collect::<Vec<_>>());
        LieAlgebra {
            ambient_dim: n,
            basis: e.basis().iter().map(|v| RatMatrix::unflatten(n, v)).collect(),
            complete,
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    fn echelon(&self) -> EchelonBasis {
        let n = self.ambient_dim;
        EchelonBasis::from_vectors(n * n, &self.basis.iter().map(|m| m.flatten()).collect::<Vec<_>>())
    }

    pub fn contains(&self, x: &RatMatrix) -> bool {
        x.rows() == self.ambient_dim && x.cols() == self.ambient_dim && self.echelon().contains(&x.flatten())
    }

    /// Same subspace (completeness flags ignored).
    pub fn same_space(&self, other: &LieAlgebra) -> bool {
        self.ambient_dim == other.ambient_dim
            && self.dim() == other.dim()
            && other.basis.iter().all(|x| self.contains(x))
    }

    pub fn is_bracket_closed(&self) -> bool {
        let e = self.echelon();
        self.basis.iter().enumerate().all(|(i, x)| {
            self.basis[..i]
                .iter()
                .all(|y| e.contains(&x.bracket(y).flatten()))
        })
    }

    pub fn is_ad_invariant(&self, gens: &[RatMatrix]) -> bool {
        let e = self.echelon();
        gens.iter().all(|g| match g.inverse() {
            Some(gi) => self.basis.iter().all(|x| e.contains(&(&(g * x) * &gi).flatten())),
            None => false,
        })
    }

    /// A pair of basis elements with nonzero bracket.
    pub fn nonabelian_pair(&self) -> Option<(RatMatrix, RatMatrix)> {
        for (i, x) in self.basis.iter().enumerate() {
            for y in &self.basis[..i] {
                if !x.bracket(y).is_zero() {
                    return Some((y.clone(), x.clone()));
                }
            }
        }
        None
    }

    pub fn is_abelian(&self) -> bool {
        self.nonabelian_pair().is_none()
    }

    /// `[L, L]`.
    pub fn derived(&self) -> LieAlgebra {
        let mut mats = Vec::new();
        for (i, x) in self.basis.iter().enumerate() {
            for y in &self.basis[..i] {
                mats.push(x.bracket(y));
            }
        }
        LieAlgebra::span(self.ambient_dim, &mats, self.complete)
    }

    /// Dimensions along the derived series, ending at 0 or at the first repeat.
    pub fn derived_series_dims(&self) -> Vec<usize> {
        let mut dims = vec![self.dim()];
        let mut cur = self.clone();
        while !cur.is_zero() {
            let next = cur.derived();
            if next.dim() == cur.dim() {
                break;
            }
            dims.push(next.dim());
            cur = next;
        }
        dims
    }

    pub fn is_solvable(&self) -> bool {
        *self.derived_series_dims().last().unwrap() == 0
    }

    pub fn to_json(&self) -> LieAlgebraJson {
        LieAlgebraJson {
            basis: self.basis.iter().map(|m| m.to_strings()).collect(),
            complete: self.complete,
        }
    }

    /// Parses the stored basis as-is (no re-echelonization).
    pub fn from_json(n: usize, j: &LieAlgebraJson) -> Option<Self> {
        let mut basis = Vec::new();
        for m in &j.basis {
            basis.push(parse_matrix(n, m)?);
        }
        Some(LieAlgebra {
            ambient_dim: n,
            basis,
            complete: j.complete,
        })
    }
}

pub(crate) fn parse_matrix(n: usize, m: &[Vec<String>]) -> Option<RatMatrix> {
    if m.len() != n {
        return None;
    }
    let mut data = Vec::with_capacity(n * n);
    for row in m {
        if row.len() != n {
            return None;
        }
        for s in row {
            data.push(parse_rational(s).ok()?);
        }
    }
    Some(RatMatrix::from_vec(n, n, data))
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "tag", content = "value")]
pub enum GroupClass {
    Finite(u64),
    VirtuallyAbelian,
    VirtuallySolvable,
    NonSolvable,
    Undecided(String),
}

impl GroupClass {
    /// Whether the group is virtually abelian; `None` if not determined.
    pub fn virtually_abelian(&self) -> Option<bool> {
        match self {
            GroupClass::Finite(_) | GroupClass::VirtuallyAbelian => Some(true),
            GroupClass::VirtuallySolvable | GroupClass::NonSolvable => Some(false),
            GroupClass::Undecided(_) => None,
        }
    }
}

impl fmt::Display for GroupClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupClass::Finite(n) => write!(f, "Finite({n})"),
            GroupClass::VirtuallyAbelian => write!(f, "VirtuallyAbelian"),
            GroupClass::VirtuallySolvable => write!(f, "VirtuallySolvable"),
            GroupClass::NonSolvable => write!(f, "NonSolvable"),
            GroupClass::Undecided(r) => write!(f, "Undecided({r})"),
        }
    }
}

fn check_invertible(gens: &[RatMatrix]) -> Result<(), ZariskiError> {
    for (i, g) in gens.iter().enumerate() {
        if !g.is_square() || g.determinant().is_zero() {
            return Err(ZariskiError::Singular(i));
        }
    }
    Ok(())
}

pub fn lie_of_cyclic(g: &RatMatrix) -> Result<LieAlgebra, ZariskiError> {
    let (s, u) = jordan_decomposition(g)?;
    let (mut mats, complete) = torus_lie(&s);
    if !u.is_identity() {
        mats.push(log_unipotent(&u));
    }
    Ok(LieAlgebra::span(g.rows(), &mats, complete))
}

/// Smallest subspace containing `start` that is closed under brackets and conjugation by `gens`.
pub fn saturate(n: usize, start: &[RatMatrix], gens: &[RatMatrix], complete: bool) -> LieAlgebra {
    let inverses: Vec<RatMatrix> = gens.iter().map(|g| g.inverse().expect("invertible")).collect();
    let mut e = EchelonBasis::new(n * n);
    let mut elems: Vec<RatMatrix> = Vec::new();
    for x in start {
        if e.insert(&x.flatten()) {
            elems.push(x.clone());
        }
    }
    let mut i = 0;
    while i < elems.len() && elems.len() < n * n {
        let x = elems[i].clone();
        for (g, gi) in gens.iter().zip(&inverses) {
            let y = &(g * &x) * gi;
            if e.insert(&y.flatten()) {
                elems.push(y);
            }
        }
        for j in 0..i {
            let y = x.bracket(&elems[j]);
            if e.insert(&y.flatten()) {
                elems.push(y);
            }
        }
        i += 1;
    }
    LieAlgebra::span(n, &elems, complete)
}

/// Word in the generators: entry `k > 0` is generator `k - 1`, `k < 0` its inverse.
pub type Word = Vec<i64>;

pub fn word_matrix(gens: &[RatMatrix], inverses: &[RatMatrix], n: usize, w: &[i64]) -> RatMatrix {
    let mut m = RatMatrix::identity(n);
    for &k in w {
        let g = if k > 0 {
            &gens[(k - 1) as usize]
        } else {
            &inverses[(-k - 1) as usize]
        };
        m = &m * g;
    }
    m
}

fn pairwise_commute(gens: &[RatMatrix]) -> bool {
    gens.iter()
        .enumerate()
        .all(|(i, g)| gens[..i].iter().all(|h| (g * h) == (h * g)))
}

/// Freely reduced words of length `len` up to inversion of the whole word, skipping repeats of one letter.
fn words_of_length(m: usize, len: usize) -> Vec<Word> {
    let letters: Vec<i64> = (1..=m as i64).flat_map(|k| [k, -k]).collect();
    let mut out: Vec<Word> = vec![Vec::new()];
    for _ in 0..len {
        let mut next = Vec::new();
        for w in &out {
            for &l in &letters {
                if w.last().is_some_and(|&x| x == -l) {
                    continue;
                }
                let mut v = w.clone();
                v.push(l);
                next.push(v);
            }
        }
        out = next;
    }
    out.into_iter()
        .filter(|w| {
            // powers of a single letter add nothing beyond that letter
            let distinct = w.iter().map(|k| k.abs()).collect::<HashSet<_>>().len() > 1;
            let inv: Word = w.iter().rev().map(|k| -k).collect();
            distinct && *w <= inv
        })
        .collect()
}

/// Lie algebra data gathered from cyclic subgroups of generators and short words.
#[derive(Clone, Debug)]
pub struct ClosureData {
    pub lie: LieAlgebra,
    pub lower: LieAlgebra,
    /// A word of infinite order, if one was seen.
    pub infinite_word: Option<Word>,
}

/// Saturates cyclic contributions of the generators; when the generators do not commute, words of
/// length two (and three when the algebra is still abelian) are added, since a group generated by
/// elements of finite order can be infinite.
pub fn closure_data(n: usize, gens: &[RatMatrix]) -> Result<ClosureData, ZariskiError> {
    check_invertible(gens)?;
    let inverses: Vec<RatMatrix> = gens.iter().map(|g| g.inverse().unwrap()).collect();
    let mut start = Vec::new();
    let mut logs = Vec::new();
    let mut complete = true;
    let mut infinite_word: Option<Word> = None;
    let mut seen: HashSet<RatMatrix> = HashSet::new();
    let mut add = |w: Word,
                   start: &mut Vec<RatMatrix>,
                   logs: &mut Vec<RatMatrix>,
                   complete: &mut bool,
                   infinite_word: &mut Option<Word>|
     -> Result<(), ZariskiError> {
        let m = word_matrix(gens, &inverses, n, &w);
        if !seen.insert(m.clone()) {
            return Ok(());
        }
        let (s, u) = jordan_decomposition(&m)?;
        let (torus, c) = torus_lie(&s);
        *complete &= c;
        let has_log = !u.is_identity();
        if has_log {
            let l = log_unipotent(&u);
            logs.push(l.clone());
            start.push(l);
        }
        if (has_log || !torus.is_empty()) && infinite_word.is_none() {
            *infinite_word = Some(w);
        }
        start.extend(torus);
        Ok(())
    };
    for k in 1..=gens.len() as i64 {
        add(vec![k], &mut start, &mut logs, &mut complete, &mut infinite_word)?;
    }
    let commuting = pairwise_commute(gens);
    if !commuting {
        for w in words_of_length(gens.len(), 2) {
            add(w, &mut start, &mut logs, &mut complete, &mut infinite_word)?;
        }
    }
    let mut lie = saturate(n, &start, gens, complete);
    if !commuting && lie.is_abelian() {
        for w in words_of_length(gens.len(), 3) {
            add(w, &mut start, &mut logs, &mut complete, &mut infinite_word)?;
        }
        lie = saturate(n, &start, gens, complete);
    }
    let lower = if complete { lie.clone() } else { saturate(n, &logs, gens, true) };
    Ok(ClosureData {
        lie,
        lower,
        infinite_word,
    })
}

pub fn lie_closure(gens: &[RatMatrix]) -> Result<LieAlgebra, ZariskiError> {
    let Some(n) = gens.first().map(|g| g.rows()) else {
        return Ok(LieAlgebra::zero(0));
    };
    Ok(closure_data(n, gens)?.lie)
}

/// Subalgebra of the true Lie algebra built from unipotent logarithms alone; exact regardless of
/// eigenvalue relations.
pub fn lie_lower_bound(gens: &[RatMatrix]) -> Result<LieAlgebra, ZariskiError> {
    let Some(n) = gens.first().map(|g| g.rows()) else {
        return Ok(LieAlgebra::zero(0));
    };
    Ok(closure_data(n, gens)?.lower)
}

/// All elements of a finite matrix group, or `None` once more than `bound` are found.
pub fn enumerate_group(gens: &[RatMatrix], n: usize, bound: usize) -> Option<Vec<RatMatrix>> {
    let id = RatMatrix::identity(n);
    let mut seen: HashSet<RatMatrix> = HashSet::new();
    seen.insert(id.clone());
    let mut order = vec![id];
    let mut i = 0;
    while i < order.len() {
        let x = order[i].clone();
        for g in gens {
            let y = &x * g;
            if seen.insert(y.clone()) {
                if seen.len() > bound {
                    return None;
                }
                order.push(y);
            }
        }
        i += 1;
    }
    Some(order)
}

/// Classification with the algebras it was derived from.
#[derive(Clone, Debug)]
pub struct Classification {
    pub class: GroupClass,
    /// Contains the true Lie algebra when `lie.complete` is false.
    pub lie: LieAlgebra,
    /// Contained in the true Lie algebra.
    pub lower: LieAlgebra,
    pub infinite_word: Option<Word>,
}

/// Classification of the group generated by `gens` inside `GL_n`.
pub fn classify_in(n: usize, gens: &[RatMatrix], enumeration_bound: usize) -> Result<Classification, ZariskiError> {
    let data = closure_data(n, gens)?;
    let (lie, lower) = (data.lie, data.lower);
    let class = if lie.is_zero() {
        match enumerate_group(gens, n, enumeration_bound) {
            Some(all) => GroupClass::Finite(all.len() as u64),
            None => GroupClass::Undecided(format!("group enumeration exceeded {enumeration_bound} elements")),
        }
    } else if lie.is_abelian() {
        GroupClass::VirtuallyAbelian
    } else if lie.complete {
        if lie.is_solvable() {
            GroupClass::VirtuallySolvable
        } else {
            GroupClass::NonSolvable
        }
    } else if !lower.is_solvable() {
        GroupClass::NonSolvable
    } else if lie.is_solvable() && !lower.is_abelian() {
        GroupClass::VirtuallySolvable
    } else {
        GroupClass::Undecided("incomplete relation lattice".into())
    };
    Ok(Classification {
        class,
        lie,
        lower,
        infinite_word: data.infinite_word,
    })
}

pub fn classify_detailed(gens: &[RatMatrix], enumeration_bound: usize) -> Result<Classification, ZariskiError> {
    let n = gens.first().map(|g| g.rows()).unwrap_or(0);
    classify_in(n, gens, enumeration_bound)
}

pub fn classify_group(gens: &[RatMatrix], enumeration_bound: usize) -> Result<GroupClass, ZariskiError> {
    Ok(classify_detailed(gens, enumeration_bound)?.class)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rational::{rat, ratio};

    fn s() -> RatMatrix {
        RatMatrix::from_i64(&[&[0, -1], &[1, 0]])
    }
    fn t() -> RatMatrix {
        RatMatrix::from_i64(&[&[1, 1], &[0, 1]])
    }
    fn diag2() -> RatMatrix {
        RatMatrix::diagonal(&[rat(2), ratio(1, 2)])
    }

    #[test]
    fn cyclic_examples() {
        let l = lie_of_cyclic(&diag2()).unwrap();
        assert_eq!(l.basis, vec![RatMatrix::diagonal(&[rat(1), rat(-1)])]);
        assert!(lie_of_cyclic(&s()).unwrap().is_zero());
        assert_eq!(lie_of_cyclic(&t()).unwrap().basis, vec![RatMatrix::from_i64(&[&[0, 1], &[0, 0]])]);
        let cat = RatMatrix::from_i64(&[&[2, 1], &[1, 1]]);
        let l = lie_of_cyclic(&cat).unwrap();
        assert_eq!(l.dim(), 1);
        assert!(l.complete);
        assert!(l.basis[0].bracket(&cat).is_zero());
    }

    #[test]
    fn closure_examples() {
        let l = lie_closure(&[s(), t()]).unwrap();
        assert_eq!(l.dim(), 3);
        assert!(l.is_bracket_closed() && l.is_ad_invariant(&[s(), t()]));
        assert!(lie_closure(&[RatMatrix::identity(2)]).unwrap().is_zero());
        let l = lie_closure(&[diag2(), s()]).unwrap();
        assert_eq!(l.basis, vec![RatMatrix::diagonal(&[rat(1), rat(-1)])]);
    }

    #[test]
    fn classify_examples() {
        let cat = RatMatrix::from_i64(&[&[2, 1], &[1, 1]]);
        assert_eq!(classify_group(&[cat], DEFAULT_ENUMERATION_BOUND).unwrap(), GroupClass::VirtuallyAbelian);
        assert_eq!(classify_group(&[s(), t()], DEFAULT_ENUMERATION_BOUND).unwrap(), GroupClass::NonSolvable);
        assert_eq!(classify_group(&[s()], DEFAULT_ENUMERATION_BOUND).unwrap(), GroupClass::Finite(4));
        let borel = [diag2(), t()];
        assert_eq!(classify_group(&borel, DEFAULT_ENUMERATION_BOUND).unwrap(), GroupClass::VirtuallySolvable);
        assert_eq!(
            classify_group(&[RatMatrix::from_i64(&[&[0, 0], &[0, 1]])], 10),
            Err(ZariskiError::Singular(0))
        );
    }

    #[test]
    fn jordan_parts_commute() {
        let g = RatMatrix::from_i64(&[&[2, 1, 0], &[0, 2, 0], &[0, 0, 3]]);
        let (s, u) = jordan_decomposition(&g).unwrap();
        assert_eq!(&s * &u, g);
        assert_eq!(&s * &u, &u * &s);
        assert_eq!(s, RatMatrix::diagonal(&[rat(2), rat(2), rat(3)]));
        let l = lie_of_cyclic(&g).unwrap();
        // torus: 2 and 3 are multiplicatively independent; plus the nilpotent log
        assert_eq!(l.dim(), 3);
    }

    #[test]
    fn cubic_eigenvalues() {
        // companion matrix of x^3 - x - 1 (a unit of norm 1)
        let g = RatMatrix::from_i64(&[&[0, 0, 1], &[1, 0, 1], &[0, 1, 0]]);
        let l = lie_of_cyclic(&g).unwrap();
        assert!(l.complete);
        // the norm relation removes the scalar direction
        assert_eq!(l.dim(), 2);
        assert!(l.basis.iter().all(|x| x.trace().is_zero()));
        assert_eq!(classify_group(&[g], 1000).unwrap(), GroupClass::VirtuallyAbelian);
    }

    #[test]
    fn two_quadratic_fields_are_flagged() {
        // eigenvalues in Q(sqrt 5) and Q(sqrt 3)
        let mut g = RatMatrix::zeros(4, 4);
        for (i, j, x) in [(0, 0, 2), (0, 1, 1), (1, 0, 1), (1, 1, 1), (2, 2, 2), (2, 3, 1), (3, 2, 3), (3, 3, 2)] {
            g[(i, j)] = rat(x);
        }
        let l = lie_of_cyclic(&g).unwrap();
        assert!(!l.complete);
        assert_eq!(l.dim(), 2);
        let c = classify_detailed(&[g], 1000).unwrap();
        assert_eq!(c.class, GroupClass::VirtuallyAbelian);
    }

    #[test]
    fn torsion_generators_of_an_infinite_group() {
        // S has order 4 and S T has order 6, yet together they generate SL_2(Z)
        let st = &s() * &t();
        let c = classify_detailed(&[s(), st], DEFAULT_ENUMERATION_BOUND).unwrap();
        assert_eq!(c.class, GroupClass::NonSolvable);
        assert_eq!(c.lie.dim(), 3);
        assert!(c.infinite_word.is_some());
        assert_eq!(classify_group(&[], 10).unwrap(), GroupClass::Finite(1));
    }
}
