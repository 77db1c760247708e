//! Integer lattices: Hermite normal form and kernels of maps `Z^n -> Z^r x prod Z/m_j`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub type IntVector = Vec<BigInt>;

/// Row-style Hermite normal form of the lattice spanned by `gens` (all of length `n`).
/// Zero rows are dropped; pivots are positive and entries above a pivot lie in `[0, pivot)`.
pub fn hnf(gens: &[IntVector], n: usize) -> Vec<IntVector> {
    let mut rows: Vec<IntVector> = gens.iter().filter(|g| g.iter().any(|x| !x.is_zero())).cloned().collect();
    let mut r = 0;
    for c in 0..n {
        if r >= rows.len() {
            break;
        }
        // Euclid across rows until at most one nonzero entry in column c remains below r
        loop {
            let nz: Vec<usize> = (r..rows.len()).filter(|&i| !rows[i][c].is_zero()).collect();
            if nz.len() <= 1 {
                if let Some(&i) = nz.first() {
                    rows.swap(r, i);
                }
                break;
            }
            let piv = *nz
                .iter()
                .min_by(|&&a, &&b| rows[a][c].abs().cmp(&rows[b][c].abs()))
                .unwrap();
            for &i in &nz {
                if i == piv {
                    continue;
                }
                let q = rows[i][c].div_floor(&rows[piv][c]);
                let prow = rows[piv].clone();
                for (x, y) in rows[i].iter_mut().zip(&prow) {
                    *x -= &q * y;
                }
            }
        }
        if r < rows.len() && !rows[r][c].is_zero() {
            if rows[r][c].is_negative() {
                for x in rows[r].iter_mut() {
                    *x = -&*x;
                }
            }
            let prow = rows[r].clone();
            for i in 0..r {
                let q = rows[i][c].div_floor(&prow[c]);
                if !q.is_zero() {
                    for (x, y) in rows[i].iter_mut().zip(&prow) {
                        *x -= &q * y;
                    }
                }
            }
            r += 1;
        }
    }
    rows.truncate(r);
    rows
}

/// Basis (in Hermite normal form) of `{x in Z^n : A x = 0, <c_j, x> = 0 mod m_j}`.
///
/// `rows` are the integer rows of `A`; `congruences` pairs each row `c_j` with its modulus `m_j > 0`.
pub fn integer_kernel(rows: &[IntVector], congruences: &[(IntVector, BigInt)], n: usize) -> Vec<IntVector> {
    let r = rows.len() + congruences.len();
    let s = congruences.len();
    // generator rows: (column of constraints, identity part); slack rows carry the moduli
    let mut gens: Vec<IntVector> = Vec::with_capacity(n + s);
    for i in 0..n {
        let mut g = vec![BigInt::zero(); r + n];
        for (k, row) in rows.iter().enumerate() {
            g[k] = row[i].clone();
        }
        for (k, (row, _)) in congruences.iter().enumerate() {
            g[rows.len() + k] = row[i].clone();
        }
        g[r + i] = BigInt::one();
        gens.push(g);
    }
    for (k, (_, m)) in congruences.iter().enumerate() {
        let mut g = vec![BigInt::zero(); r + n];
        g[rows.len() + k] = m.clone();
        gens.push(g);
    }
    let h = hnf(&gens, r + n);
    let kernel_gens: Vec<IntVector> = h
        .into_iter()
        .filter(|row| row[..r].iter().all(Zero::is_zero))
        .map(|row| row[r..].to_vec())
        .collect();
    hnf(&kernel_gens, n)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(xs: &[i64]) -> IntVector {
        xs.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn hnf_is_canonical() {
        let a = hnf(&[v(&[2, -1]), v(&[4, -2])], 2);
        assert_eq!(a, vec![v(&[2, -1])]);
        let b = hnf(&[v(&[3, 1]), v(&[1, 1])], 2);
        assert_eq!(b, vec![v(&[1, 1]), v(&[0, 2])]);
    }

    #[test]
    fn kernel_with_congruence() {
        // x + 2y = 0 over Z: (2, -1) up to sign
        let k = integer_kernel(&[v(&[1, 2])], &[], 2);
        assert_eq!(k, vec![v(&[2, -1])]);
        // sign parity x = 0 mod 2 and no other constraint on (x, y)
        let k = integer_kernel(&[], &[(v(&[1, 0]), BigInt::from(2))], 2);
        assert_eq!(k, vec![v(&[2, 0]), v(&[0, 1])]);
    }
}
