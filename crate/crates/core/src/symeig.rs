//! Dense symmetric eigensolver: Householder tridiagonalization followed by
//! implicit-shift QL iteration with accumulated eigenvectors.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::matrix::{norm2, Matrix, SymMatrix};

const EPS: f64 = f64::EPSILON / 2.0;

/// `W = U diag(theta) U^T` with `theta` sorted nondecreasing.
#[derive(Clone, Debug, PartialEq)]
pub struct EigDecomp {
    pub u: Matrix,
    pub theta: Vec<f64>,
}

/// `Q^T W Q = T` with `T` tridiagonal: diagonal `d`, off-diagonal `e`
/// (`e[i]` couples `i` and `i + 1`).
#[derive(Clone, Debug, PartialEq)]
pub struct Tridiagonal {
    pub q: Matrix,
    pub d: Vec<f64>,
    pub e: Vec<f64>,
}

pub fn tridiagonalize(w: &SymMatrix) -> Tridiagonal {
    let n = w.n();
    let mut a = w.as_matrix().clone();
    let mut q = Matrix::identity(n);
    let mut e = vec![0.0; n.saturating_sub(1)];
    let mut v = vec![0.0; n];
    let mut p = vec![0.0; n];
    let mut qv = vec![0.0; n];

    for k in 0..n.saturating_sub(2) {
        let x = &a.col(k)[k + 1..];
        let alpha = x[0];
        let tail = norm2(&x[1..]);
        if tail == 0.0 {
            e[k] = alpha;
            continue;
        }
        let xnorm = libm::hypot(alpha, tail);
        let beta = if alpha >= 0.0 { -xnorm } else { xnorm };
        let tau = (beta - alpha) / beta;
        let scale = 1.0 / (alpha - beta);
        let m = n - k - 1;
        v[0] = 1.0;
        for i in 1..m {
            v[i] = x[i] * scale;
        }
        let v = &v[..m];

        // Trailing block update A22 <- H A22 H with H = I - tau v v^T.
        let off = k + 1;
        for (j, pj) in p[..m].iter_mut().enumerate() {
            let col = &a.col(off + j)[off..];
            *pj = tau * col.iter().zip(v).map(|(c, vi)| c * vi).sum::<f64>();
        }
        let pv: f64 = p[..m].iter().zip(v).map(|(a, b)| a * b).sum();
        let half = 0.5 * tau * pv;
        for i in 0..m {
            p[i] -= half * v[i];
        }
        for j in 0..m {
            let (vj, wj) = (v[j], p[j]);
            let col = &mut a.col_mut(off + j)[off..];
            for i in 0..m {
                col[i] -= v[i] * wj + p[i] * vj;
            }
        }
        e[k] = beta;
        for i in off + 1..n {
            a[(i, k)] = 0.0;
        }

        // Q <- Q H, touching columns off..n.
        qv.iter_mut().for_each(|s| *s = 0.0);
        for j in 0..m {
            let s = v[j];
            for (acc, c) in qv.iter_mut().zip(q.col(off + j)) {
                *acc += c * s;
            }
        }
        for j in 0..m {
            let s = tau * v[j];
            for (c, acc) in q.col_mut(off + j).iter_mut().zip(&qv) {
                *c -= acc * s;
            }
        }
    }
    if n >= 2 {
        e[n - 2] = a[(n - 1, n - 2)];
    }
    let d = (0..n).map(|i| a[(i, i)]).collect();
    Tridiagonal { q, d, e }
}

/// Implicit QL with Wilkinson shifts on a tridiagonal matrix, rotating the
/// columns of `q` along. Off-diagonal `e[i]` is deflated once
/// `|e[i]| <= u (|d[i]| + |d[i + 1]|)`.
pub fn tql_implicit(t: Tridiagonal) -> Result<EigDecomp> {
    let Tridiagonal { mut q, mut d, e: off } = t;
    let n = d.len();
    if off.len() + 1 != n.max(1) || q.ncols() != n {
        return Err(Error::DimensionMismatch { expected: n.saturating_sub(1), found: off.len() });
    }
    let mut e = off;
    e.push(0.0);
    let max_sweeps = 50 * n.max(1);
    let mut sweeps = 0;

    for l in 0..n {
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= EPS * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            sweeps += 1;
            if sweeps > max_sweeps {
                return Err(Error::NoConvergence { index: l });
            }

            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = libm::hypot(g, 1.0);
            g = d[m] - d[l] + e[l] / (g + if g >= 0.0 { r } else { -r });
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut underflow = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = libm::hypot(f, g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                rotate_columns(&mut q, i, c, s);
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
    let theta = order.iter().map(|&k| d[k]).collect();
    let mut u = Matrix::zeros(q.nrows(), n);
    for (dst, &src) in order.iter().enumerate() {
        u.col_mut(dst).copy_from_slice(q.col(src));
    }
    Ok(EigDecomp { u, theta })
}

/// Applies the plane rotation to columns `i` and `i + 1`.
fn rotate_columns(q: &mut Matrix, i: usize, c: f64, s: f64) {
    let n = q.nrows();
    let (left, right) = q.col_pair_mut(i);
    for k in 0..n {
        let f = right[k];
        right[k] = s * left[k] + c * f;
        left[k] = c * left[k] - s * f;
    }
}

/// Full eigendecomposition of a symmetric matrix.
pub fn sym_eig(w: &SymMatrix) -> Result<EigDecomp> {
    tql_implicit(tridiagonalize(w))
}
