use alloc::vec::Vec;

use super::sym_swap_lower;
use crate::error::{Error, Result};
use crate::matrix::{Matrix, SymMatrix};

/// Truncated pivoted Cholesky factor `B ~= Cb Cb^T` with `Cb` of size `n x r`.
#[derive(Clone, Debug, PartialEq)]
pub struct SemidefFactor {
    /// `perm[k]` is the original index eliminated at step `k`.
    pub perm: Vec<usize>,
    /// `n x r` factor with rows in the original ordering.
    pub cb: Matrix,
    pub rank: usize,
    /// Pivot values `Cb(perm[k], k)^2` in elimination order; nonincreasing.
    pub pivots: Vec<f64>,
}

impl SemidefFactor {
    pub fn n(&self) -> usize {
        self.cb.nrows()
    }

    /// `Cb Cb^T` as a symmetric matrix.
    pub fn reconstruct(&self) -> SymMatrix {
        let n = self.n();
        let cb = &self.cb;
        SymMatrix::from_lower_fn(n, |i, j| (0..self.rank).map(|k| cb[(i, k)] * cb[(j, k)]).sum())
            .expect("product of finite factor entries")
    }
}

/// Pivoted Cholesky that stops at the first nonpositive pivot.
pub fn pivoted_cholesky(b: &SymMatrix) -> Result<SemidefFactor> {
    pivoted_cholesky_with_tol(b, 0.0)
}

/// Pivoted Cholesky that stops once the largest remaining diagonal entry is at
/// most `rel_tol` times the largest diagonal entry of `B`.
pub fn pivoted_cholesky_with_tol(b: &SymMatrix, rel_tol: f64) -> Result<SemidefFactor> {
    if !(rel_tol >= 0.0) {
        return Err(Error::InvalidArgument("truncation tolerance must be nonnegative"));
    }
    let n = b.n();
    let mut a = b.as_matrix().clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let max_diag = (0..n).map(|i| a[(i, i)]).fold(0.0f64, f64::max);
    let threshold = rel_tol * max_diag;
    let mut pivots = Vec::new();

    let mut rank = 0;
    while rank < n {
        let k = rank;
        let mut piv = k;
        for i in k + 1..n {
            if a[(i, i)] > a[(piv, piv)] {
                piv = i;
            }
        }
        let d = a[(piv, piv)];
        if !(d > threshold) {
            break;
        }
        sym_swap_lower(&mut a, k, k, piv);
        perm.swap(k, piv);

        let lkk = libm::sqrt(d);
        a[(k, k)] = lkk;
        for i in k + 1..n {
            a[(i, k)] /= lkk;
        }
        for j in k + 1..n {
            let ljk = a[(j, k)];
            if ljk == 0.0 {
                continue;
            }
            for i in j..n {
                let lik = a[(i, k)];
                a[(i, j)] -= lik * ljk;
            }
        }
        pivots.push(d);
        rank += 1;
    }

    if rank == 0 {
        return Err(Error::NotPositiveSemidefinite);
    }

    let mut cb = Matrix::zeros(n, rank);
    for k in 0..rank {
        for i in k..n {
            cb[(perm[i], k)] = a[(i, k)];
        }
    }
    Ok(SemidefFactor { perm, cb, rank, pivots })
}
