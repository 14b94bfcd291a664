//! The two factorizations of the shifted pencil: a truncating pivoted
//! Cholesky of `B` and a rook-pivoted LDL^T of `A - sigma B` converted to the
//! signed form `Ca Da Ca^T`.

mod cholesky;
mod ldlt;
mod signed;

pub use cholesky::{pivoted_cholesky, pivoted_cholesky_with_tol, SemidefFactor};
pub use ldlt::{ldlt_rook, LdltFactor, PivotBlock};
pub use signed::{to_signed_factor, SignedFactor, XFactor};

use crate::matrix::Matrix;

/// Symmetric interchange of indices `p < q` in a matrix whose lower triangle
/// holds the active block `k..n` and whose columns `0..k` hold finished
/// factor columns.
fn sym_swap_lower(a: &mut Matrix, k: usize, p: usize, q: usize) {
    debug_assert!(k <= p && p <= q);
    if p == q {
        return;
    }
    let n = a.nrows();
    for j in 0..k {
        let t = a[(p, j)];
        a[(p, j)] = a[(q, j)];
        a[(q, j)] = t;
    }
    for j in k..p {
        let t = a[(p, j)];
        a[(p, j)] = a[(q, j)];
        a[(q, j)] = t;
    }
    let t = a[(p, p)];
    a[(p, p)] = a[(q, q)];
    a[(q, q)] = t;
    for j in p + 1..q {
        let t = a[(j, p)];
        a[(j, p)] = a[(q, j)];
        a[(q, j)] = t;
    }
    for i in q + 1..n {
        let t = a[(i, p)];
        a[(i, p)] = a[(i, q)];
        a[(i, q)] = t;
    }
}
