//! Dense storage and the elementary kernels shared by every stage of the
//! solver: shifting, symmetric products and 2-norm estimation.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use crate::error::{Error, Result};

/// Dense column-major `nrows x ncols` matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    nrows: usize,
    ncols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Matrix { nrows, ncols, data: vec![0.0; nrows * ncols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_fn(nrows: usize, ncols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(nrows * ncols);
        for j in 0..ncols {
            for i in 0..nrows {
                data.push(f(i, j));
            }
        }
        Matrix { nrows, ncols, data }
    }

    /// Builds a matrix from column-major data.
    pub fn from_col_major(nrows: usize, ncols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != nrows * ncols {
            return Err(Error::DimensionMismatch { expected: nrows * ncols, found: data.len() });
        }
        Ok(Matrix { nrows, ncols, data })
    }

    /// Builds a matrix from a slice of equally long rows.
    pub fn from_rows(rows: &[&[f64]]) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        if let Some(bad) = rows.iter().find(|r| r.len() != ncols) {
            return Err(Error::DimensionMismatch { expected: ncols, found: bad.len() });
        }
        Ok(Matrix::from_fn(nrows, ncols, |i, j| rows[i][j]))
    }

    #[inline]
    pub fn nrows(&self) -> usize {
        self.nrows
    }

    #[inline]
    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn col(&self, j: usize) -> &[f64] {
        &self.data[j * self.nrows..(j + 1) * self.nrows]
    }

    #[inline]
    pub fn col_mut(&mut self, j: usize) -> &mut [f64] {
        &mut self.data[j * self.nrows..(j + 1) * self.nrows]
    }

    /// Mutable views of columns `i` and `i + 1`.
    pub(crate) fn col_pair_mut(&mut self, i: usize) -> (&mut [f64], &mut [f64]) {
        let n = self.nrows;
        self.data[i * n..(i + 2) * n].split_at_mut(n)
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        let n = self.nrows;
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let (left, right) = self.data.split_at_mut(hi * n);
        left[lo * n..(lo + 1) * n].swap_with_slice(&mut right[..n]);
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.ncols {
            self.data.swap(j * self.nrows + a, j * self.nrows + b);
        }
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.ncols, self.nrows, |i, j| self[(j, i)])
    }

    /// `self * other`, accumulated column by column.
    pub fn matmul(&self, other: &Matrix) -> Result<Matrix> {
        if self.ncols != other.nrows {
            return Err(Error::DimensionMismatch { expected: self.ncols, found: other.nrows });
        }
        let mut out = Matrix::zeros(self.nrows, other.ncols);
        for j in 0..other.ncols {
            let dst = &mut out.data[j * self.nrows..(j + 1) * self.nrows];
            for (k, &s) in other.col(j).iter().enumerate() {
                if s != 0.0 {
                    axpy(s, self.col(k), dst);
                }
            }
        }
        Ok(out)
    }

    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.ncols {
            return Err(Error::DimensionMismatch { expected: self.ncols, found: x.len() });
        }
        let mut y = vec![0.0; self.nrows];
        self.matvec_into(x, &mut y);
        Ok(y)
    }

    pub(crate) fn matvec_into(&self, x: &[f64], y: &mut [f64]) {
        y.iter_mut().for_each(|v| *v = 0.0);
        for (j, &s) in x.iter().enumerate() {
            if s != 0.0 {
                axpy(s, self.col(j), y);
            }
        }
    }

    /// `self^T * x`.
    pub fn tr_matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.nrows {
            return Err(Error::DimensionMismatch { expected: self.nrows, found: x.len() });
        }
        let mut y = vec![0.0; self.ncols];
        self.tr_matvec_into(x, &mut y);
        Ok(y)
    }

    pub(crate) fn tr_matvec_into(&self, x: &[f64], y: &mut [f64]) {
        for (j, yj) in y.iter_mut().enumerate() {
            *yj = dot(self.col(j), x);
        }
    }

    pub fn sub(&self, other: &Matrix) -> Result<Matrix> {
        if self.nrows != other.nrows || self.ncols != other.ncols {
            return Err(Error::DimensionMismatch {
                expected: self.nrows * self.ncols,
                found: other.nrows * other.ncols,
            });
        }
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Ok(Matrix { nrows: self.nrows, ncols: self.ncols, data })
    }

    pub fn frobenius_norm(&self) -> f64 {
        norm2(&self.data)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        debug_assert!(i < self.nrows && j < self.ncols);
        &self.data[j * self.nrows + i]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        debug_assert!(i < self.nrows && j < self.ncols);
        &mut self.data[j * self.nrows + i]
    }
}

/// Real symmetric `n x n` matrix.
///
/// Stored in full with the lower triangle authoritative: every constructor
/// reads the lower triangle and mirrors it, so `get(i, j) == get(j, i)` holds
/// bit-exactly. All entries are finite.
#[derive(Clone, Debug, PartialEq)]
pub struct SymMatrix {
    inner: Matrix,
}

impl SymMatrix {
    /// Builds from a generator evaluated on the lower triangle (`i >= j`).
    pub fn from_lower_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut m = Matrix::zeros(n, n);
        for j in 0..n {
            for i in j..n {
                let v = f(i, j);
                if !v.is_finite() {
                    return Err(Error::NonFinite { row: i, col: j });
                }
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        Ok(SymMatrix { inner: m })
    }

    /// Takes the lower triangle of a square matrix and mirrors it.
    pub fn from_lower(m: &Matrix) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch { expected: m.nrows(), found: m.ncols() });
        }
        SymMatrix::from_lower_fn(m.nrows(), |i, j| m[(i, j)])
    }

    pub fn from_rows(rows: &[&[f64]]) -> Result<Self> {
        SymMatrix::from_lower(&Matrix::from_rows(rows)?)
    }

    pub fn from_diag(d: &[f64]) -> Result<Self> {
        SymMatrix::from_lower_fn(d.len(), |i, j| if i == j { d[i] } else { 0.0 })
    }

    pub fn identity(n: usize) -> Self {
        SymMatrix { inner: Matrix::identity(n) }
    }

    pub fn zeros(n: usize) -> Self {
        SymMatrix { inner: Matrix::zeros(n, n) }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.inner.nrows
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.inner[(i, j)]
    }

    pub fn as_matrix(&self) -> &Matrix {
        &self.inner
    }

    pub fn into_matrix(self) -> Matrix {
        self.inner
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n()).map(|i| self.get(i, i)).collect()
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        SymMatrix::from_lower_fn(self.n(), |i, j| c * self.get(i, j))
    }

    pub fn is_zero(&self) -> bool {
        self.inner.data.iter().all(|&v| v == 0.0)
    }
}

/// `A - sigma B` evaluated element-wise on the lower triangle and mirrored.
pub fn shifted_subtract(a: &SymMatrix, b: &SymMatrix, sigma: f64) -> Result<SymMatrix> {
    if a.n() != b.n() {
        return Err(Error::DimensionMismatch { expected: a.n(), found: b.n() });
    }
    if !sigma.is_finite() {
        return Err(Error::InvalidArgument("shift must be finite"));
    }
    SymMatrix::from_lower_fn(a.n(), |i, j| a.get(i, j) - sigma * b.get(i, j))
}

/// `M x`, summing columns in index order.
pub fn sym_matvec(m: &SymMatrix, x: &[f64]) -> Result<Vec<f64>> {
    m.inner.matvec(x)
}

/// Convergence controls for [`norm2_estimate`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormSettings {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for NormSettings {
    fn default() -> Self {
        NormSettings { tol: 1e-6, max_iter: 200 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Norm2Estimate {
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Power-iteration estimate of `||M||_2` for symmetric `M`.
///
/// Starts from the normalized all-ones vector and tracks `||M x_k||_2`, which
/// is nondecreasing and bounded by `||M||_2`. When the result falls short of
/// the largest column norm the start vector missed the dominant eigenspace,
/// so a second run starts from a fixed pseudo-random vector.
pub fn norm2_estimate(m: &SymMatrix, tol: f64, max_iter: usize) -> Norm2Estimate {
    let n = m.n();
    let col_bound = (0..n).map(|j| norm2(m.inner.col(j))).fold(0.0, f64::max);
    if col_bound == 0.0 {
        return Norm2Estimate { value: 0.0, iterations: 0, converged: true };
    }
    let mut apply = |x: &[f64], y: &mut [f64]| m.inner.matvec_into(x, y);
    let first = power_iteration(n, &mut apply, ones_unit(n), tol, max_iter);
    if first.value >= col_bound {
        return first;
    }
    let second = power_iteration(n, &mut apply, seeded_unit_vector(n, 0), tol, max_iter);
    let iterations = first.iterations + second.iterations;
    if second.value > first.value {
        Norm2Estimate { iterations, ..second }
    } else {
        Norm2Estimate { iterations, ..first }
    }
}

/// Estimate of `||M||_2` for a rectangular `M`, as the square root of a power
/// iteration on `M^T M`.
pub fn norm2_estimate_rect(m: &Matrix, tol: f64, max_iter: usize) -> Norm2Estimate {
    let k = m.ncols();
    let col_bound = (0..k).map(|j| norm2(m.col(j))).fold(0.0, f64::max);
    if col_bound == 0.0 {
        return Norm2Estimate { value: 0.0, iterations: 0, converged: true };
    }
    let mut tmp = vec![0.0; m.nrows()];
    let mut apply = |x: &[f64], y: &mut [f64]| {
        m.matvec_into(x, &mut tmp);
        m.tr_matvec_into(&tmp, y);
    };
    let bound = col_bound * col_bound;
    let mut est = power_iteration(k, &mut apply, ones_unit(k), tol, max_iter);
    if est.value < bound {
        let second = power_iteration(k, &mut apply, seeded_unit_vector(k, 0), tol, max_iter);
        let iterations = est.iterations + second.iterations;
        if second.value > est.value {
            est = second;
        }
        est.iterations = iterations;
    }
    // ||M^T M||_2 >= max_j ||M e_j||^2 always holds, so never report less.
    Norm2Estimate { value: libm::sqrt(est.value.max(bound)), ..est }
}

fn power_iteration(
    n: usize,
    apply: &mut dyn FnMut(&[f64], &mut [f64]),
    start: Vec<f64>,
    tol: f64,
    max_iter: usize,
) -> Norm2Estimate {
    let mut x = start;
    let mut y = vec![0.0; n];
    let mut value = 0.0;
    for it in 1..=max_iter {
        apply(&x, &mut y);
        let next = norm2(&y);
        if next == 0.0 {
            return Norm2Estimate { value: 0.0, iterations: it, converged: false };
        }
        let change = (next - value).abs();
        value = next;
        for (xi, yi) in x.iter_mut().zip(&y) {
            *xi = yi / next;
        }
        if change <= tol * next && it > 1 {
            return Norm2Estimate { value, iterations: it, converged: true };
        }
    }
    Norm2Estimate { value, iterations: max_iter, converged: false }
}

fn ones_unit(n: usize) -> Vec<f64> {
    vec![1.0 / libm::sqrt(n as f64); n]
}

/// Deterministic unit vector with entries in `(-1, 1)` from a splitmix64
/// stream keyed by `seed`.
pub(crate) fn seeded_unit_vector(n: usize, seed: u64) -> Vec<f64> {
    let mut state = seed;
    let mut v: Vec<f64> = (0..n)
        .map(|_| {
            state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
            let mut z = state;
            z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
            z ^= z >> 31;
            ((z >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        })
        .collect();
    let nrm = norm2(&v);
    v.iter_mut().for_each(|x| *x /= nrm);
    v
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub(crate) fn axpy(s: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += s * xi;
    }
}

/// Euclidean norm with scaling against overflow and underflow.
pub(crate) fn norm2(x: &[f64]) -> f64 {
    let scale = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if scale == 0.0 || !scale.is_finite() {
        return scale;
    }
    let ssq: f64 = x.iter().map(|v| (v / scale) * (v / scale)).sum();
    scale * libm::sqrt(ssq)
}
