//! Residuals and normwise backward errors for computed generalized
//! eigenpairs.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::factor::ldlt_rook;
use crate::matrix::{axpy, dot, norm2, seeded_unit_vector, sym_matvec, Matrix, SymMatrix};
use crate::symeig::{tql_implicit, Tridiagonal};
use crate::UNIT_ROUNDOFF;

/// Reports clamp best-possible residuals from below at this value.
pub const RESIDUAL_FLOOR: f64 = 1e-25;

const INVERSE_ITERATION_TOL: f64 = 1e-8;
const INVERSE_ITERATION_MAX: usize = 100;

/// The `||A||_2`, `||B||_2` values residuals are measured against.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PencilNorms {
    pub a: f64,
    pub b: f64,
}

impl PencilNorms {
    fn scale(&self, alpha: f64, beta: f64) -> f64 {
        beta.abs() * self.a + alpha.abs() * self.b
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ResidualRecord {
    pub index: usize,
    pub alpha: f64,
    pub beta: f64,
    pub lambda: f64,
    pub rel_res: f64,
    pub best_res: Option<f64>,
    pub backward_eps: Option<f64>,
}

/// `r = beta A v - alpha B v`.
pub fn residual_vector(
    a: &SymMatrix,
    b: &SymMatrix,
    alpha: f64,
    beta: f64,
    v: &[f64],
) -> Result<Vec<f64>> {
    let av = sym_matvec(a, v)?;
    let bv = sym_matvec(b, v)?;
    Ok(av.iter().zip(&bv).map(|(x, y)| beta * x - alpha * y).collect())
}

/// `||beta A v - alpha B v||_2 / ((|beta| ||A||_2 + |alpha| ||B||_2) ||v||_2)`.
pub fn relative_residual(
    a: &SymMatrix,
    b: &SymMatrix,
    norms: PencilNorms,
    alpha: f64,
    beta: f64,
    v: &[f64],
) -> Result<f64> {
    let vn = norm2(v);
    if vn == 0.0 {
        return Err(Error::ZeroVector);
    }
    let den = norms.scale(alpha, beta);
    if den == 0.0 {
        return Err(Error::InvalidArgument("(alpha, beta) = (0, 0) or zero pencil norms"));
    }
    let r = residual_vector(a, b, alpha, beta, v)?;
    Ok(norm2(&r) / (den * vn))
}

fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Rank-one perturbations `E`, `F` with `(beta (A + E) - alpha (B + F)) v = 0`
/// where `r = beta A v - alpha B v`:
///
/// `E = -sign(beta) ||A|| / (s ||v||^2) r v^T`, `F = sign(alpha) ||B|| / (s ||v||^2) r v^T`,
/// `s = |beta| ||A|| + |alpha| ||B||`.
pub fn backward_error_pair(
    norms: PencilNorms,
    alpha: f64,
    beta: f64,
    v: &[f64],
    r: &[f64],
) -> Result<(Matrix, Matrix)> {
    if v.len() != r.len() {
        return Err(Error::DimensionMismatch { expected: v.len(), found: r.len() });
    }
    let vn = norm2(v);
    if vn == 0.0 {
        return Err(Error::ZeroVector);
    }
    let den = norms.scale(alpha, beta);
    if den == 0.0 {
        return Err(Error::InvalidArgument("(alpha, beta) = (0, 0) or zero pencil norms"));
    }
    let base = 1.0 / (den * vn * vn);
    let ce = -sign(beta) * norms.a * base;
    let cf = sign(alpha) * norms.b * base;
    let n = v.len();
    let e = Matrix::from_fn(n, n, |i, j| ce * r[i] * v[j]);
    let f = Matrix::from_fn(n, n, |i, j| cf * r[i] * v[j]);
    Ok((e, f))
}

/// `sigma_min(beta A - alpha B) / (|beta| ||A||_2 + |alpha| ||B||_2)`, the
/// smallest relative residual any vector can attain for `(alpha, beta)`.
///
/// `sigma_min` of the symmetric `beta A - alpha B` comes from
/// [`smallest_singular_value`]; an exactly singular factorization gives 0.
pub fn best_possible_residual(
    a: &SymMatrix,
    b: &SymMatrix,
    norms: PencilNorms,
    alpha: f64,
    beta: f64,
) -> Result<f64> {
    if a.n() != b.n() {
        return Err(Error::DimensionMismatch { expected: a.n(), found: b.n() });
    }
    let den = norms.scale(alpha, beta);
    if den == 0.0 {
        return Err(Error::InvalidArgument("(alpha, beta) = (0, 0) or zero pencil norms"));
    }
    let m = SymMatrix::from_lower_fn(a.n(), |i, j| beta * a.get(i, j) - alpha * b.get(i, j))?;
    Ok(smallest_singular_value(&m) / den)
}

/// Smallest singular value of a symmetric matrix.
///
/// Runs Lanczos with full reorthogonalization on `M^{-1}` (applied through a
/// rook-pivoted `LDL^T`), i.e. inverse iteration with a Rayleigh-Ritz
/// extraction over all iterates so far. Stops once the largest Ritz value
/// magnitude changes by at most `1e-8` relative, after 100 steps, or when the
/// Krylov space becomes invariant. A singular factorization gives 0.
pub fn smallest_singular_value(m: &SymMatrix) -> f64 {
    let n = m.n();
    if n == 0 {
        return 0.0;
    }
    let Ok(f) = ldlt_rook(m) else {
        return 0.0;
    };
    let steps = n.min(INVERSE_ITERATION_MAX);
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(steps);
    let mut alphas = Vec::with_capacity(steps);
    let mut betas: Vec<f64> = Vec::with_capacity(steps);
    let mut q = seeded_unit_vector(n, 1);
    let mut estimate = f64::INFINITY;
    for k in 0..steps {
        let mut w = q.clone();
        f.solve_in_place(&mut w);
        if !w.iter().all(|v| v.is_finite()) {
            return 0.0;
        }
        let alpha = dot(&q, &w);
        axpy(-alpha, &q, &mut w);
        if let (Some(prev), Some(&b)) = (basis.last(), betas.last()) {
            axpy(-b, prev, &mut w);
        }
        basis.push(q);
        for _ in 0..2 {
            for v in &basis {
                let c = dot(v, &w);
                axpy(-c, v, &mut w);
            }
        }
        alphas.push(alpha);
        let beta = norm2(&w);

        let t = Tridiagonal { q: Matrix::identity(k + 1), d: alphas.clone(), e: betas.clone() };
        let Ok(eig) = tql_implicit(t) else {
            return estimate;
        };
        let top = eig.theta.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        if top == 0.0 || !top.is_finite() {
            return 0.0;
        }
        let next = 1.0 / top;
        let done = (next - estimate).abs() <= INVERSE_ITERATION_TOL * next
            || beta <= UNIT_ROUNDOFF * top;
        estimate = next;
        if done {
            break;
        }
        betas.push(beta);
        q = w.iter().map(|v| v / beta).collect();
    }
    estimate
}
