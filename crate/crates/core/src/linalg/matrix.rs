//! Dense matrices over the rationals.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::rational::{format_rational, lcm_of_denominators, rat, Rational};

pub type RatVector = Vec<Rational>;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

/// Output of [`RatMatrix::rref`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rref {
    pub matrix: RatMatrix,
    pub rank: usize,
    pub pivots: Vec<usize>,
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMatrix {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rational::one();
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<Rational>) -> Self {
        assert_eq!(data.len(), rows * cols, "entries must fill the grid");
        RatMatrix { rows, cols, data }
    }

    /// Builds a matrix from row vectors; all rows must have equal length.
    pub fn from_rows(rows: &[RatVector]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged rows");
            data.extend(r.iter().cloned());
        }
        RatMatrix {
            rows: rows.len(),
            cols,
            data,
        }
    }

    /// Builds a `dim x k` matrix whose columns are the given vectors.
    pub fn from_columns(dim: usize, cols: &[RatVector]) -> Self {
        let mut m = Self::zeros(dim, cols.len());
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.len(), dim);
            for i in 0..dim {
                m[(i, j)] = c[i].clone();
            }
        }
        m
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let r: Vec<RatVector> = rows
            .iter()
            .map(|row| row.iter().map(|&x| rat(x)).collect())
            .collect();
        Self::from_rows(&r)
    }

    pub fn diagonal(entries: &[Rational]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, e) in entries.iter().enumerate() {
            m[(i, i)] = e.clone();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[Rational] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vectors(&self) -> Vec<RatVector> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn column(&self, j: usize) -> RatVector {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn column_vectors(&self) -> Vec<RatVector> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.is_square() && *self == Self::identity(self.rows)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn trace(&self) -> Rational {
        (0..self.rows.min(self.cols))
            .map(|i| self[(i, i)].clone())
            .fold(Rational::zero(), |a, b| a + b)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        RatMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * c).collect(),
        }
    }

    pub fn mul_vec(&self, v: &[Rational]) -> RatVector {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .fold(Rational::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect()
    }

    pub fn pow(&self, mut e: u64) -> Self {
        assert!(self.is_square());
        let mut base = self.clone();
        let mut acc = Self::identity(self.rows);
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

    /// Commutator bracket `[A, B] = AB - BA`.
    pub fn bracket(&self, other: &Self) -> Self {
        &(self * other) - &(other * self)
    }

    /// Row-major entries as one vector (used to treat matrices as points of `Q^{n^2}`).
    pub fn flatten(&self) -> RatVector {
        self.data.clone()
    }

    pub fn unflatten(n: usize, v: &[Rational]) -> Self {
        Self::from_vec(n, n, v.to_vec())
    }

    /// Reduced row echelon form.
    ///
    /// Forward elimination is fraction-free (Bareiss) on the denominator-cleared
    /// integer rows; only the final normalization divides.
    pub fn rref(&self) -> Rref {
        let (rows, cols) = (self.rows, self.cols);
        let mut m: Vec<Vec<BigInt>> = (0..rows)
            .map(|i| {
                let r = self.row(i);
                let l = lcm_of_denominators(r);
                r.iter().map(|q| (q * &l).to_integer()).collect()
            })
            .collect();
        let mut pivots = Vec::new();
        let mut prev = BigInt::one();
        let mut r = 0;
        for c in 0..cols {
            if r == rows {
                break;
            }
            let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
                continue;
            };
            m.swap(r, p);
            for i in r + 1..rows {
                for j in c + 1..cols {
                    let v = &m[r][c] * &m[i][j] - &m[i][c] * &m[r][j];
                    debug_assert!((&v % &prev).is_zero());
                    m[i][j] = v / &prev;
                }
                m[i][c] = BigInt::zero();
            }
            prev = m[r][c].clone();
            pivots.push(c);
            r += 1;
        }
        let rank = pivots.len();
        let mut out: Vec<Vec<Rational>> = m
            .into_iter()
            .map(|row| row.into_iter().map(Rational::from_integer).collect())
            .collect();
        for (i, &c) in pivots.iter().enumerate().rev() {
            let inv = out[i][c].recip();
            for x in out[i].iter_mut() {
                *x = &*x * &inv;
            }
            for k in 0..i {
                if out[k][c].is_zero() {
                    continue;
                }
                let f = out[k][c].clone();
                for j in c..cols {
                    if out[i][j].is_zero() {
                        continue;
                    }
                    let t = &f * &out[i][j];
                    out[k][j] -= t;
                }
            }
        }
        for row in out.iter_mut().skip(rank) {
            for x in row.iter_mut() {
                *x = Rational::zero();
            }
        }
        let matrix = if rows == 0 {
            Self::zeros(0, cols)
        } else {
            Self::from_rows(&out)
        };
        Rref {
            matrix,
            rank,
            pivots,
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().rank
    }

    /// Null-space basis: one vector per free column, that column set to one.
    pub fn kernel(&self) -> Vec<RatVector> {
        let Rref { matrix, pivots, .. } = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![Rational::zero(); self.cols];
                v[f] = Rational::one();
                for (i, &p) in pivots.iter().enumerate() {
                    v[p] = -matrix[(i, f)].clone();
                }
                v
            })
            .collect()
    }

    /// Canonical basis (nonzero rref rows) of the row space.
    pub fn row_space(&self) -> Vec<RatVector> {
        let r = self.rref();
        (0..r.rank).map(|i| r.matrix.row(i).to_vec()).collect()
    }

    pub fn determinant(&self) -> Rational {
        assert!(self.is_square());
        let n = self.rows;
        let mut a = self.data.clone();
        let mut det = Rational::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !a[i * n + c].is_zero()) else {
                return Rational::zero();
            };
            if p != c {
                for j in 0..n {
                    a.swap(c * n + j, p * n + j);
                }
                det = -det;
            }
            let piv = a[c * n + c].clone();
            det *= &piv;
            for i in c + 1..n {
                if a[i * n + c].is_zero() {
                    continue;
                }
                let f = &a[i * n + c] / &piv;
                for j in c..n {
                    let t = &f * &a[c * n + j];
                    a[i * n + j] -= t;
                }
            }
        }
        det
    }

    pub fn inverse(&self) -> Option<Self> {
        assert!(self.is_square());
        let n = self.rows;
        let mut aug = Self::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, n + i)] = Rational::one();
        }
        let r = aug.rref();
        if r.pivots.len() < n || r.pivots[n - 1] != n - 1 {
            return None;
        }
        let mut inv = Self::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                inv[(i, j)] = r.matrix[(i, n + j)].clone();
            }
        }
        Some(inv)
    }

    pub fn to_strings(&self) -> Vec<Vec<String>> {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(format_rational).collect())
            .collect()
    }
}

impl std::ops::Index<(usize, usize)> for RatMatrix {
    type Output = Rational;
    fn index(&self, (i, j): (usize, usize)) -> &Rational {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for RatMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rational {
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &RatMatrix {
    type Output = RatMatrix;
    fn mul(self, rhs: &RatMatrix) -> RatMatrix {
        assert_eq!(self.cols, rhs.rows, "shape mismatch in product");
        let mut out = RatMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = &rhs[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        out
    }
}

impl Add for &RatMatrix {
    type Output = RatMatrix;
    fn add(self, rhs: &RatMatrix) -> RatMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        RatMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &RatMatrix {
    type Output = RatMatrix;
    fn sub(self, rhs: &RatMatrix) -> RatMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        RatMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &RatMatrix {
    type Output = RatMatrix;
    fn neg(self) -> RatMatrix {
        RatMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| -a).collect(),
        }
    }
}

impl fmt::Debug for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.to_strings())
    }
}

impl fmt::Display for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .to_strings()
            .into_iter()
            .map(|r| format!("[{}]", r.join(", ")))
            .collect();
        write!(f, "[{}]", rows.join(", "))
    }
}

/// Reduces `v` against an rref basis (rows with leading ones at `pivots`); zero iff `v` is in the span.
pub fn reduce_against(basis: &[RatVector], pivots: &[usize], v: &[Rational]) -> RatVector {
    let mut r = v.to_vec();
    for (b, &p) in basis.iter().zip(pivots) {
        if r[p].is_zero() {
            continue;
        }
        let f = r[p].clone();
        for (x, y) in r.iter_mut().zip(b) {
            if !y.is_zero() {
                *x -= &f * y;
            }
        }
    }
    r
}

/// Incrementally maintained row-reduced basis of a subspace of `Q^n`.
#[derive(Clone, Debug, Default)]
pub struct EchelonBasis {
    dim: usize,
    rows: Vec<RatVector>,
    pivots: Vec<usize>,
}

impl EchelonBasis {
    pub fn new(dim: usize) -> Self {
        EchelonBasis {
            dim,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn from_vectors(dim: usize, vs: &[RatVector]) -> Self {
        let mut b = Self::new(dim);
        for v in vs {
            b.insert(v);
        }
        b
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn reduce(&self, v: &[Rational]) -> RatVector {
        reduce_against(&self.rows, &self.pivots, v)
    }

    pub fn contains(&self, v: &[Rational]) -> bool {
        self.reduce(v).iter().all(Zero::is_zero)
    }

    /// Adds `v`; returns true iff the rank grew.
    pub fn insert(&mut self, v: &[Rational]) -> bool {
        assert_eq!(v.len(), self.dim);
        let r = self.reduce(v);
        let Some(p) = r.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = r[p].recip();
        let r: RatVector = r.iter().map(|x| x * &inv).collect();
        for row in self.rows.iter_mut() {
            if row[p].is_zero() {
                continue;
            }
            let f = row[p].clone();
            for (x, y) in row.iter_mut().zip(&r) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
        }
        let pos = self.pivots.partition_point(|&q| q < p);
        self.pivots.insert(pos, p);
        self.rows.insert(pos, r);
        true
    }

    /// Fully reduced basis, ordered by pivot column.
    pub fn basis(&self) -> &[RatVector] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rational::ratio;

    #[test]
    fn rref_examples() {
        let m = RatMatrix::from_i64(&[&[1, 2], &[2, 4]]);
        let r = m.rref();
        assert_eq!(r.matrix, RatMatrix::from_i64(&[&[1, 2], &[0, 0]]));
        assert_eq!(r.rank, 1);
        assert_eq!(r.pivots, vec![0]);

        let id = RatMatrix::identity(3);
        assert_eq!(id.rref().matrix, id);
        assert_eq!(id.rref().rank, 3);

        let swap = RatMatrix::from_i64(&[&[0, 1], &[1, 0]]);
        assert_eq!(swap.rref().matrix, RatMatrix::identity(2));
        assert_eq!(swap.rref().rank, 2);
    }

    #[test]
    fn kernel_examples() {
        let m = RatMatrix::from_i64(&[&[1, 2], &[2, 4]]);
        assert_eq!(m.kernel(), vec![vec![rat(-2), rat(1)]]);
        assert!(RatMatrix::from_i64(&[&[2, 1], &[1, 1]]).kernel().is_empty());
        assert_eq!(
            RatMatrix::zeros(2, 2).kernel(),
            vec![vec![rat(1), rat(0)], vec![rat(0), rat(1)]]
        );
    }

    #[test]
    fn rref_with_fractions_and_skipped_columns() {
        let m = RatMatrix::from_rows(&[
            vec![ratio(1, 2), rat(0), rat(1), rat(3)],
            vec![rat(1), rat(0), ratio(2, 3), rat(1)],
            vec![rat(2), rat(0), ratio(8, 3), rat(8)],
        ]);
        let r = m.rref();
        assert_eq!(r.pivots, vec![0, 2, 3]);
        assert_eq!(r.matrix, RatMatrix::from_i64(&[&[1, 0, 0, 0], &[0, 0, 1, 0], &[0, 0, 0, 1]]));
    }

    #[test]
    fn inverse_and_determinant() {
        let m = RatMatrix::from_i64(&[&[2, 1], &[1, 1]]);
        assert_eq!(m.determinant(), rat(1));
        let inv = m.inverse().unwrap();
        assert_eq!(&m * &inv, RatMatrix::identity(2));
        assert!(RatMatrix::from_i64(&[&[1, 2], &[2, 4]]).inverse().is_none());
        assert_eq!(RatMatrix::from_i64(&[&[0, 1], &[1, 0]]).determinant(), rat(-1));
    }

    #[test]
    fn echelon_basis_membership() {
        let mut b = EchelonBasis::new(3);
        assert!(b.insert(&[rat(1), rat(1), rat(0)]));
        assert!(b.insert(&[rat(0), rat(1), rat(1)]));
        assert!(!b.insert(&[rat(1), rat(2), rat(1)]));
        assert!(b.contains(&[rat(1), rat(0), rat(-1)]));
        assert!(!b.contains(&[rat(0), rat(0), rat(1)]));
        assert_eq!(b.pivots(), &[0, 1]);
    }
}
