//! Invariant subspaces of `Q^d` under a finite set of matrices.

pub mod meataxe;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::ModuleError;
use crate::linalg::matrix::{EchelonBasis, RatMatrix, RatVector};
use crate::linalg::rational::{format_rational, parse_rational, Rational};

pub use meataxe::{
    composition_factors, find_submodule, is_irreducible, simple_submodule_reps, verify_norton, Irreducibility,
    NortonCertificate,
};

/// A subspace of `Q^d`, stored by its reduced row echelon basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Submodule {
    ambient_dim: usize,
    basis: Vec<RatVector>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubmoduleJson {
    pub ambient_dim: usize,
    pub basis: Vec<Vec<String>>,
}

impl Submodule {
    /// Span of arbitrary vectors, canonicalized.
    pub fn span(ambient_dim: usize, vectors: &[RatVector]) -> Self {
        let e = EchelonBasis::from_vectors(ambient_dim, vectors);
        Submodule {
            ambient_dim,
            basis: e.basis().to_vec(),
        }
    }

    pub fn zero(ambient_dim: usize) -> Self {
        Submodule {
            ambient_dim,
            basis: Vec::new(),
        }
    }

    pub fn full(ambient_dim: usize) -> Self {
        let basis = RatMatrix::identity(ambient_dim).row_vectors();
        Submodule { ambient_dim, basis }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[RatVector] {
        &self.basis
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.basis.len() == self.ambient_dim
    }

    fn echelon(&self) -> EchelonBasis {
        EchelonBasis::from_vectors(self.ambient_dim, &self.basis)
    }

    pub fn contains(&self, v: &[Rational]) -> bool {
        self.echelon().contains(v)
    }

    pub fn contains_subspace(&self, other: &Submodule) -> bool {
        let e = self.echelon();
        other.basis.iter().all(|v| e.contains(v))
    }

    /// Whether `g v` stays in the span for every generator and basis vector.
    pub fn is_invariant(&self, gens: &[RatMatrix]) -> bool {
        let e = self.echelon();
        gens.iter()
            .all(|g| g.cols() == self.ambient_dim && self.basis.iter().all(|v| e.contains(&g.mul_vec(v))))
    }

    /// Columns are the basis vectors.
    pub fn basis_matrix(&self) -> RatMatrix {
        RatMatrix::from_columns(self.ambient_dim, &self.basis)
    }

    /// `{x : <x, w> = 0 for all w}`.
    pub fn annihilator(&self) -> Submodule {
        if self.basis.is_empty() {
            return Submodule::full(self.ambient_dim);
        }
        let k = RatMatrix::from_rows(&self.basis).kernel();
        Submodule::span(self.ambient_dim, &k)
    }

    /// Image under a linear map.
    pub fn map(&self, m: &RatMatrix) -> Submodule {
        let imgs: Vec<RatVector> = self.basis.iter().map(|v| m.mul_vec(v)).collect();
        Submodule::span(m.rows(), &imgs)
    }

    /// Ordering used to choose canonical representatives: dimension, pivot columns, then entries.
    pub fn canonical_key(&self) -> (usize, Vec<usize>, Vec<RatVector>) {
        let c = Submodule::span(self.ambient_dim, &self.basis);
        let pivots = c
            .basis
            .iter()
            .map(|v| v.iter().position(|x| !x.is_zero()).unwrap_or(0))
            .collect();
        (c.dim(), pivots, c.basis)
    }

    pub fn to_json(&self) -> SubmoduleJson {
        SubmoduleJson {
            ambient_dim: self.ambient_dim,
            basis: self
                .basis
                .iter()
                .map(|v| v.iter().map(format_rational).collect())
                .collect(),
        }
    }

    /// Parses without canonicalizing, so tampering with a stored basis stays visible to checks.
    pub fn from_json(j: &SubmoduleJson) -> Option<Self> {
        let mut basis = Vec::new();
        for row in &j.basis {
            if row.len() != j.ambient_dim {
                return None;
            }
            let v: Option<RatVector> = row.iter().map(|s| parse_rational(s).ok()).collect();
            basis.push(v?);
        }
        if EchelonBasis::from_vectors(j.ambient_dim, &basis).rank() != basis.len() {
            return None;
        }
        Some(Submodule {
            ambient_dim: j.ambient_dim,
            basis,
        })
    }
}

/// A submodule together with the generators written in its basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ActionOnSubmodule {
    pub submodule: Submodule,
    pub restricted_gens: Vec<RatMatrix>,
}

fn check_dims(gens: &[RatMatrix], d: usize) -> Result<(), ModuleError> {
    for g in gens {
        if g.rows() != d || g.cols() != d {
            return Err(ModuleError::DimensionMismatch {
                expected: d,
                found: if g.rows() != d { g.rows() } else { g.cols() },
            });
        }
    }
    Ok(())
}

/// Smallest invariant subspace containing the seeds.
pub fn spin(seed: &[RatVector], gens: &[RatMatrix], d: usize) -> Result<Submodule, ModuleError> {
    check_dims(gens, d)?;
    for s in seed {
        if s.len() != d {
            return Err(ModuleError::DimensionMismatch {
                expected: d,
                found: s.len(),
            });
        }
    }
    Ok(spin_unchecked(seed, gens, d))
}

pub(crate) fn spin_unchecked(seed: &[RatVector], gens: &[RatMatrix], d: usize) -> Submodule {
    let mut e = EchelonBasis::new(d);
    let mut queue: Vec<RatVector> = Vec::new();
    for s in seed {
        if e.insert(s) {
            queue.push(s.clone());
        }
    }
    while let Some(v) = queue.pop() {
        if e.rank() == d {
            break;
        }
        for g in gens {
            let w = g.mul_vec(&v);
            if e.insert(&w) {
                queue.push(w);
            }
        }
    }
    Submodule {
        ambient_dim: d,
        basis: e.basis().to_vec(),
    }
}

/// Coordinates of `y` in the rref basis `w`, or `None` if `y` is outside the span.
fn coordinates(w: &Submodule, pivots: &[usize], y: &[Rational]) -> Option<RatVector> {
    let coords: RatVector = pivots.iter().map(|&p| y[p].clone()).collect();
    let mut r = y.to_vec();
    for (c, b) in coords.iter().zip(w.basis()) {
        for (x, t) in r.iter_mut().zip(b) {
            *x -= c * t;
        }
    }
    r.iter().all(Zero::is_zero).then_some(coords)
}

/// Generators expressed in the basis of an invariant subspace.
pub fn restrict(gens: &[RatMatrix], w: &Submodule) -> Result<ActionOnSubmodule, ModuleError> {
    check_dims(gens, w.ambient_dim)?;
    let w = Submodule::span(w.ambient_dim, &w.basis);
    let e = w.echelon();
    let pivots = e.pivots().to_vec();
    let k = w.dim();
    let mut restricted = Vec::with_capacity(gens.len());
    for (gi, g) in gens.iter().enumerate() {
        let mut m = RatMatrix::zeros(k, k);
        for (j, b) in w.basis.iter().enumerate() {
            let img = g.mul_vec(b);
            let c = coordinates(&w, &pivots, &img).ok_or(ModuleError::NotInvariant { generator: gi })?;
            for (i, x) in c.into_iter().enumerate() {
                m[(i, j)] = x;
            }
        }
        restricted.push(m);
    }
    Ok(ActionOnSubmodule {
        submodule: w,
        restricted_gens: restricted,
    })
}

/// Action on `Q^d / W`, in the basis given by standard vectors at the non-pivot columns of `W`.
pub fn quotient_action(gens: &[RatMatrix], w: &Submodule) -> Vec<RatMatrix> {
    let d = w.ambient_dim;
    let e = w.echelon();
    let free: Vec<usize> = (0..d).filter(|c| !e.pivots().contains(c)).collect();
    gens.iter()
        .map(|g| {
            let mut m = RatMatrix::zeros(free.len(), free.len());
            for (j, &c) in free.iter().enumerate() {
                let img = e.reduce(&g.column(c));
                // after reduction the pivot entries vanish; remaining coordinates sit on free columns
                for (i, &r) in free.iter().enumerate() {
                    m[(i, j)] = img[r].clone();
                }
            }
            m
        })
        .collect()
}

/// Lift of a subspace of the quotient `Q^d / W` (coordinates on the free columns) back to `Q^d`.
pub fn lift_from_quotient(w: &Submodule, u: &Submodule) -> Submodule {
    let d = w.ambient_dim;
    let e = w.echelon();
    let free: Vec<usize> = (0..d).filter(|c| !e.pivots().contains(c)).collect();
    let mut vs: Vec<RatVector> = w.basis.clone();
    for b in u.basis() {
        let mut v = vec![Rational::zero(); d];
        for (x, &c) in b.iter().zip(&free) {
            v[c] = x.clone();
        }
        vs.push(v);
    }
    Submodule::span(d, &vs)
}

/// Basis of the homomorphisms `X` (d_v x d_t) with `gv X = X gt` for all paired generators.
pub fn hom_space(gens_t: &[RatMatrix], gens_v: &[RatMatrix]) -> Vec<RatMatrix> {
    let t = gens_t.first().map(|g| g.rows()).unwrap_or(0);
    let v = gens_v.first().map(|g| g.rows()).unwrap_or(0);
    hom_space_dims(gens_t, gens_v, t, v)
}

pub fn hom_space_dims(gens_t: &[RatMatrix], gens_v: &[RatMatrix], t: usize, v: usize) -> Vec<RatMatrix> {
    let unknowns = v * t;
    if unknowns == 0 {
        return Vec::new();
    }
    // unknown X[i][j] at index i * t + j
    let mut rows: Vec<RatVector> = Vec::new();
    for (gt, gv) in gens_t.iter().zip(gens_v) {
        for i in 0..v {
            for j in 0..t {
                // (gv X - X gt)[i][j]
                let mut r = vec![Rational::zero(); unknowns];
                for k in 0..v {
                    let c = &gv[(i, k)];
                    if !c.is_zero() {
                        r[k * t + j] += c;
                    }
                }
                for k in 0..t {
                    let c = &gt[(k, j)];
                    if !c.is_zero() {
                        r[i * t + k] -= c;
                    }
                }
                if r.iter().any(|x| !x.is_zero()) {
                    rows.push(r);
                }
            }
        }
    }
    let kernel = if rows.is_empty() {
        RatMatrix::identity(unknowns).row_vectors()
    } else {
        RatMatrix::from_rows(&rows).kernel()
    };
    kernel.into_iter().map(|k| RatMatrix::from_vec(v, t, k)).collect()
}

/// Basis of the associative algebra (with identity) generated by `gens`, as flattened matrices.
pub fn algebra_basis(gens: &[RatMatrix], d: usize) -> Vec<RatMatrix> {
    let mut e = EchelonBasis::new(d * d);
    let mut out: Vec<RatMatrix> = Vec::new();
    let id = RatMatrix::identity(d);
    e.insert(&id.flatten());
    out.push(id);
    let mut i = 0;
    while i < out.len() {
        let x = out[i].clone();
        for g in gens {
            let y = g * &x;
            if e.insert(&y.flatten()) {
                out.push(y);
            }
        }
        i += 1;
    }
    out
}

pub fn in_algebra(basis: &[RatMatrix], x: &RatMatrix) -> bool {
    let d = x.rows();
    let flat: Vec<RatVector> = basis.iter().map(|b| b.flatten()).collect();
    EchelonBasis::from_vectors(d * d, &flat).contains(&x.flatten())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rational::rat;

    fn v(x: &[i64]) -> RatVector {
        x.iter().map(|&a| rat(a)).collect()
    }

    #[test]
    fn spin_examples() {
        let t = RatMatrix::from_i64(&[&[1, 1], &[0, 1]]);
        assert!(spin(&[v(&[0, 1])], &[t.clone()], 2).unwrap().is_full());
        assert_eq!(spin(&[v(&[1, 0])], &[t.clone()], 2).unwrap().basis(), &[v(&[1, 0])]);
        assert!(spin(&[], &[t.clone()], 2).unwrap().is_zero());
        assert!(matches!(
            spin(&[v(&[1, 0, 0])], &[t], 2),
            Err(ModuleError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn restrict_examples() {
        let a = RatMatrix::from_i64(&[&[2, 1], &[1, 1]]);
        let r = restrict(&[a.clone()], &Submodule::full(2)).unwrap();
        assert_eq!(r.restricted_gens[0], a);
        let t = RatMatrix::from_i64(&[&[1, 1], &[0, 1]]);
        let r = restrict(&[t.clone()], &Submodule::span(2, &[v(&[1, 0])])).unwrap();
        assert_eq!(r.restricted_gens[0], RatMatrix::from_i64(&[&[1]]));
        let dg = RatMatrix::from_i64(&[&[2, 0], &[0, 3]]);
        let r = restrict(&[dg], &Submodule::span(2, &[v(&[0, 1])])).unwrap();
        assert_eq!(r.restricted_gens[0], RatMatrix::from_i64(&[&[3]]));
        assert_eq!(
            restrict(&[t], &Submodule::span(2, &[v(&[0, 1])])),
            Err(ModuleError::NotInvariant { generator: 0 })
        );
    }

    #[test]
    fn quotient_and_hom() {
        let t = RatMatrix::from_i64(&[&[1, 1], &[0, 1]]);
        let w = Submodule::span(2, &[v(&[1, 0])]);
        assert_eq!(quotient_action(&[t.clone()], &w), vec![RatMatrix::from_i64(&[&[1]])]);
        let triv = RatMatrix::from_i64(&[&[1]]);
        let homs = hom_space(&[triv], &[t]);
        assert_eq!(homs.len(), 1);
        assert_eq!(homs[0].column(0), v(&[1, 0]));
        assert_eq!(algebra_basis(&[RatMatrix::from_i64(&[&[0, -1], &[1, 0]])], 2).len(), 2);
    }
}
