//! The spectral transformation driver, its shift diagnostics, and the
//! Cholesky-based reference method it is compared against.
//!
//! With `A - sigma B = Ca Da Ca^T` and `B = Cb Cb^T`, every finite eigenvalue
//! `lambda` of the pencil maps to an eigenvalue `theta = 1 / (lambda - sigma)`
//! of `W = X^T Da X`, `X = Ca^{-1} Cb`. Each eigenpair `(theta, u)` of `W`
//! gives the pair `(alpha, beta) = (1 + sigma theta, theta)` with eigenvector
//! `v = Ca^{-T} Da X u`. The factor `eta ||X||_2`, where
//! `eta = sqrt(||A - sigma B||_2 / ||B||_2)`, gauges how much the solves with
//! `Ca` can amplify rounding errors and is checked against a caller-supplied
//! ceiling before the eigendecomposition is attempted.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::factor::{
    ldlt_rook, pivoted_cholesky_with_tol, to_signed_factor, SemidefFactor, SignedFactor, XFactor,
};
use crate::matrix::{
    dot, norm2, norm2_estimate, norm2_estimate_rect, shifted_subtract, Matrix, Norm2Estimate,
    NormSettings, SymMatrix,
};
use crate::symeig::{sym_eig, EigDecomp};
use crate::UNIT_ROUNDOFF;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectralOptions {
    /// Ceiling on `eta ||X||_2`; the driver aborts above it.
    pub etax_max: f64,
    pub norms: NormSettings,
    /// Relative truncation tolerance for the pivoted Cholesky of `B`.
    pub cholesky_tol: f64,
}

impl Default for SpectralOptions {
    fn default() -> Self {
        SpectralOptions { etax_max: 1e4, norms: NormSettings::default(), cholesky_tol: 0.0 }
    }
}

/// Generalized eigenvalue `(alpha, beta)` of `beta A v = alpha B v`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EigenPair {
    pub alpha: f64,
    pub beta: f64,
    /// Eigenvalue of the transformed problem, when the pair came from one.
    pub theta: Option<f64>,
}

impl EigenPair {
    pub fn from_theta(sigma: f64, theta: f64) -> Self {
        EigenPair { alpha: 1.0 + sigma * theta, beta: theta, theta: Some(theta) }
    }

    pub fn from_lambda(lambda: f64) -> Self {
        EigenPair { alpha: lambda, beta: 1.0, theta: None }
    }

    /// `alpha / beta`, signed infinity when `beta == 0`.
    pub fn lambda(&self) -> f64 {
        if self.beta == 0.0 {
            if self.alpha >= 0.0 {
                f64::INFINITY
            } else {
                f64::NEG_INFINITY
            }
        } else {
            self.alpha / self.beta
        }
    }
}

/// Quantities that govern the quality of a shift.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ShiftDiagnostics {
    pub sigma: f64,
    /// `sigma ||B||_2 / ||A||_2`.
    pub sigma0: f64,
    /// `sqrt(||A - sigma B||_2 / ||B||_2)`.
    pub eta: f64,
    pub etax: f64,
    /// `||A||_2 / ||A - sigma B||_2`.
    pub gamma: f64,
    /// `||X||_2^2 / ||X^T Da X||_2`; infinite when `X^T Da X = 0`.
    pub mu: f64,
    pub norm_a: Norm2Estimate,
    pub norm_b: Norm2Estimate,
    pub norm_shifted: Norm2Estimate,
    pub norm_x: Norm2Estimate,
    pub norm_w: f64,
    pub norm_settings: NormSettings,
}

/// Both factorizations of a shifted pencil plus `X`, before the guard.
#[derive(Clone, Debug)]
pub struct FactoredPencil {
    pub sigma: f64,
    pub shifted: SignedFactor,
    pub semidef: SemidefFactor,
    pub x: XFactor,
    pub norm_a: Norm2Estimate,
    pub norm_b: Norm2Estimate,
    pub norm_shifted: Norm2Estimate,
    pub norm_settings: NormSettings,
}

impl FactoredPencil {
    pub fn eta(&self) -> f64 {
        libm::sqrt(self.norm_shifted.value / self.norm_b.value)
    }

    pub fn etax(&self) -> f64 {
        self.eta() * self.x.norm2.value
    }

    /// Factors `A - sigma B` and `B`, then solves `Ca X = Cb`.
    pub fn new(a: &SymMatrix, b: &SymMatrix, sigma: f64, opts: &SpectralOptions) -> Result<Self> {
        let shifted_matrix = shifted_subtract(a, b, sigma)?;
        let shifted = to_signed_factor(ldlt_rook(&shifted_matrix)?)?;
        let semidef = pivoted_cholesky_with_tol(b, opts.cholesky_tol)?;

        let ns = opts.norms;
        let norm_a = norm2_estimate(a, ns.tol, ns.max_iter);
        let norm_b = norm2_estimate(b, ns.tol, ns.max_iter);
        let norm_shifted = norm2_estimate(&shifted_matrix, ns.tol, ns.max_iter);
        if norm_a.value == 0.0 {
            return Err(Error::ZeroNorm { which: "A" });
        }
        if norm_b.value == 0.0 {
            return Err(Error::ZeroNorm { which: "B" });
        }

        let x = shifted.solve_ca(&semidef.cb)?;
        let norm_x = norm2_estimate_rect(&x, ns.tol, ns.max_iter);
        Ok(FactoredPencil {
            sigma,
            shifted,
            semidef,
            x: XFactor { x, norm2: norm_x },
            norm_a,
            norm_b,
            norm_shifted,
            norm_settings: ns,
        })
    }
}

#[derive(Clone, Debug)]
pub struct SpectralResult {
    /// Sorted by `theta` nondecreasing.
    pub pairs: Vec<EigenPair>,
    /// `n x r`, unit 2-norm columns matching `pairs`.
    pub v: Matrix,
    pub diagnostics: ShiftDiagnostics,
    pub rank: usize,
    pub x: Matrix,
    pub w: SymMatrix,
    pub eig: EigDecomp,
}

impl SpectralResult {
    pub fn n(&self) -> usize {
        self.v.nrows()
    }

    /// Number of infinite eigenvalues contributed by the null space of `B`.
    pub fn infinite_count(&self) -> usize {
        self.n() - self.rank
    }
}

/// `W = X^T (Da X)`, averaged with its transpose.
pub fn form_w(x: &Matrix, da: &[f64]) -> Result<SymMatrix> {
    if x.nrows() != da.len() {
        return Err(Error::DimensionMismatch { expected: x.nrows(), found: da.len() });
    }
    let r = x.ncols();
    let mut dax = x.clone();
    for j in 0..r {
        for (v, s) in dax.col_mut(j).iter_mut().zip(da) {
            *v *= s;
        }
    }
    let m = Matrix::from_fn(r, r, |i, j| dot(x.col(i), dax.col(j)));
    SymMatrix::from_lower_fn(r, |i, j| 0.5 * (m[(i, j)] + m[(j, i)]))
}

/// Diagnostics for a factored pencil. `theta`, when available, supplies
/// `||X^T Da X||_2 = max |theta_i|`; otherwise it is estimated.
pub fn shift_diagnostics(state: &FactoredPencil, theta: Option<&[f64]>) -> Result<ShiftDiagnostics> {
    let norm_w = match theta {
        Some(t) => t.iter().fold(0.0f64, |m, v| m.max(v.abs())),
        None => {
            let w = form_w(&state.x.x, state.shifted.da())?;
            let ns = state.norm_settings;
            norm2_estimate(&w, ns.tol, ns.max_iter).value
        }
    };
    let norm_x = state.x.norm2;
    let mu = if norm_w == 0.0 {
        f64::INFINITY
    } else {
        norm_x.value * norm_x.value / norm_w
    };
    Ok(ShiftDiagnostics {
        sigma: state.sigma,
        sigma0: state.sigma * state.norm_b.value / state.norm_a.value,
        eta: state.eta(),
        etax: state.etax(),
        gamma: state.norm_a.value / state.norm_shifted.value,
        mu,
        norm_a: state.norm_a,
        norm_b: state.norm_b,
        norm_shifted: state.norm_shifted,
        norm_x,
        norm_w,
        norm_settings: state.norm_settings,
    })
}

/// Shift-and-invert solve of `beta A v = alpha B v` with default estimator
/// settings.
pub fn spectral_trans_eig(
    a: &SymMatrix,
    b: &SymMatrix,
    sigma: f64,
    etax_max: f64,
) -> Result<SpectralResult> {
    spectral_trans_eig_with(a, b, sigma, &SpectralOptions { etax_max, ..Default::default() })
}

pub fn spectral_trans_eig_with(
    a: &SymMatrix,
    b: &SymMatrix,
    sigma: f64,
    opts: &SpectralOptions,
) -> Result<SpectralResult> {
    if !(opts.etax_max > 0.0) {
        return Err(Error::InvalidArgument("etax_max must be positive"));
    }
    if a.n() != b.n() {
        return Err(Error::DimensionMismatch { expected: a.n(), found: b.n() });
    }
    // An exactly zero pivot leaves X unbounded, which the guard reports.
    let state = match FactoredPencil::new(a, b, sigma, opts) {
        Err(Error::SingularShift { .. }) => {
            return Err(Error::EtaXGuard { etax: f64::INFINITY, etax_max: opts.etax_max })
        }
        other => other?,
    };
    let etax = state.etax();
    if !(etax <= opts.etax_max) {
        return Err(Error::EtaXGuard { etax, etax_max: opts.etax_max });
    }

    let da = state.shifted.da();
    let w = form_w(&state.x.x, da)?;
    let eig = sym_eig(&w)?;

    let mut rhs = state.x.x.matmul(&eig.u)?;
    for j in 0..rhs.ncols() {
        for (v, s) in rhs.col_mut(j).iter_mut().zip(da) {
            *v *= s;
        }
    }
    let mut v = state.shifted.solve_ca_transpose(&rhs)?;

    let n = a.n();
    let rank = state.semidef.rank;
    if rank == n && eig.theta.iter().any(|&t| t == 0.0) {
        // A zero theta with Cb u = 0 takes u itself as the eigenvector.
        let cb = &state.semidef.cb;
        let ns = state.norm_settings;
        let cb_norm = norm2_estimate_rect(cb, ns.tol, ns.max_iter).value;
        for (j, _) in eig.theta.iter().enumerate().filter(|(_, &t)| t == 0.0) {
            let u = eig.u.col(j);
            let cbu = cb.matvec(u)?;
            if norm2(&cbu) <= n as f64 * UNIT_ROUNDOFF * cb_norm * norm2(u) {
                v.col_mut(j).copy_from_slice(u);
            }
        }
    }
    normalize_columns(&mut v)?;

    let pairs = eig.theta.iter().map(|&t| EigenPair::from_theta(sigma, t)).collect();
    let diagnostics = shift_diagnostics(&state, Some(&eig.theta))?;
    Ok(SpectralResult { pairs, v, diagnostics, rank, x: state.x.x, w, eig })
}

fn normalize_columns(v: &mut Matrix) -> Result<()> {
    for j in 0..v.ncols() {
        let col = v.col_mut(j);
        let nrm = norm2(col);
        if nrm == 0.0 || !nrm.is_finite() {
            return Err(Error::ZeroVector);
        }
        col.iter_mut().for_each(|x| *x /= nrm);
    }
    Ok(())
}

/// A shift recovered from a scaled shift, with the norm estimates used.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScaledShift {
    pub sigma: f64,
    pub norm_a: Norm2Estimate,
    pub norm_b: Norm2Estimate,
}

/// `sigma = sigma0 ||A||_2 / ||B||_2`.
pub fn sigma_from_scaled(
    a: &SymMatrix,
    b: &SymMatrix,
    sigma0: f64,
    norms: NormSettings,
) -> Result<ScaledShift> {
    let norm_a = norm2_estimate(a, norms.tol, norms.max_iter);
    let norm_b = norm2_estimate(b, norms.tol, norms.max_iter);
    if norm_a.value == 0.0 {
        return Err(Error::ZeroNorm { which: "A" });
    }
    if norm_b.value == 0.0 {
        return Err(Error::ZeroNorm { which: "B" });
    }
    Ok(ScaledShift { sigma: sigma0 * norm_a.value / norm_b.value, norm_a, norm_b })
}

/// Output of the Cholesky-based reference method.
#[derive(Clone, Debug)]
pub struct StandardResult {
    /// `(lambda, 1)` pairs, `lambda` nondecreasing.
    pub pairs: Vec<EigenPair>,
    /// Unit 2-norm eigenvector columns.
    pub v: Matrix,
    pub eig: EigDecomp,
}

/// Reference method: `B = L L^T`, eigendecomposition of `L^{-1} A L^{-T}`,
/// eigenvectors `L^{-T} U`.
pub fn standard_cholesky_eig(a: &SymMatrix, b: &SymMatrix) -> Result<StandardResult> {
    let n = a.n();
    if b.n() != n {
        return Err(Error::DimensionMismatch { expected: n, found: b.n() });
    }
    let l = cholesky_lower(b)?;
    let mut y = a.as_matrix().clone();
    for j in 0..n {
        forward_solve(&l, y.col_mut(j));
    }
    let mut z = y.transpose();
    for j in 0..n {
        forward_solve(&l, z.col_mut(j));
    }
    let m = SymMatrix::from_lower_fn(n, |i, j| 0.5 * (z[(i, j)] + z[(j, i)]))?;
    let eig = sym_eig(&m)?;
    let mut v = eig.u.clone();
    for j in 0..n {
        back_solve_transpose(&l, v.col_mut(j));
    }
    normalize_columns(&mut v)?;
    let pairs = eig.theta.iter().map(|&lam| EigenPair::from_lambda(lam)).collect();
    Ok(StandardResult { pairs, v, eig })
}

/// Unpivoted Cholesky; fails on the first nonpositive pivot.
fn cholesky_lower(b: &SymMatrix) -> Result<Matrix> {
    let n = b.n();
    let mut l = b.as_matrix().clone();
    for k in 0..n {
        let d = l[(k, k)];
        if !(d > 0.0) {
            return Err(Error::NotPositiveDefinite { index: k, pivot: d });
        }
        let lkk = libm::sqrt(d);
        l[(k, k)] = lkk;
        for i in k + 1..n {
            l[(i, k)] /= lkk;
        }
        for j in k + 1..n {
            let ljk = l[(j, k)];
            for i in j..n {
                let lik = l[(i, k)];
                l[(i, j)] -= lik * ljk;
            }
        }
    }
    for j in 1..n {
        for i in 0..j {
            l[(i, j)] = 0.0;
        }
    }
    Ok(l)
}

fn forward_solve(l: &Matrix, x: &mut [f64]) {
    let n = l.nrows();
    for j in 0..n {
        x[j] /= l[(j, j)];
        let xj = x[j];
        if xj != 0.0 {
            let col = l.col(j);
            for i in j + 1..n {
                x[i] -= col[i] * xj;
            }
        }
    }
}

fn back_solve_transpose(l: &Matrix, x: &mut [f64]) {
    let n = l.nrows();
    for j in (0..n).rev() {
        let col = l.col(j);
        let s: f64 = (j + 1..n).map(|i| col[i] * x[i]).sum();
        x[j] = (x[j] - s) / col[j];
    }
}
