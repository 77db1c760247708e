//! Exact linear algebra over the rationals.

pub mod factor;
pub mod lattice;
pub mod matrix;
pub mod poly;
pub mod rational;

pub use factor::{factor_poly, is_irreducible};
pub use matrix::{EchelonBasis, RatMatrix, RatVector, Rref};
pub use poly::{annihilating_polys, characteristic_polynomial, minimal_polynomial, RatPoly};
pub use rational::{format_rational, parse_rational, rat, ratio, Rational};

/// Reduced row echelon form with its rank and pivot columns.
pub fn rref(m: &RatMatrix) -> (RatMatrix, usize, Vec<usize>) {
    let r = m.rref();
    (r.matrix, r.rank, r.pivots)
}

pub fn kernel(m: &RatMatrix) -> Vec<RatVector> {
    m.kernel()
}
