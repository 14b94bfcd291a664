use alloc::vec;
use alloc::vec::Vec;

use super::ldlt::{LdltFactor, PivotBlock};
use crate::error::{Error, Result};
use crate::matrix::{Matrix, Norm2Estimate};

/// `A - sigma B = Ca Da Ca^T` held as `Ca = P L Q Dsigma`.
///
/// `Q` is block diagonal with the same 1x1/2x2 structure as the `LDL^T`
/// pivots, `Dsigma` is positive and `Da` holds `+1`/`-1`.
#[derive(Clone, Debug, PartialEq)]
pub struct SignedFactor {
    perm: Vec<usize>,
    l: Matrix,
    block_sizes: Vec<usize>,
    /// Row-major 2x2 block of `Q` for every 2x2 pivot, indexed like `block_sizes`.
    q_blocks: Vec<Option<[f64; 4]>>,
    dsigma: Vec<f64>,
    da: Vec<f64>,
}

/// Solution of `Ca X = Cb` together with its 2-norm estimate.
#[derive(Clone, Debug, PartialEq)]
pub struct XFactor {
    pub x: Matrix,
    pub norm2: Norm2Estimate,
}

/// Splits each pivot block of `D` into `Q Dsigma Da Dsigma Q^T`.
///
/// 2x2 blocks use a Jacobi rotation computed from the half-angle cotangent,
/// with eigenvalue `d22 + t d21` first.
pub fn to_signed_factor(f: LdltFactor) -> Result<SignedFactor> {
    let n = f.n();
    let mut dsigma = vec![0.0; n];
    let mut da = vec![0.0; n];
    let mut block_sizes = Vec::with_capacity(f.blocks.len());
    let mut q_blocks = Vec::with_capacity(f.blocks.len());

    for blk in &f.blocks {
        match *blk {
            PivotBlock::One { start, d } => {
                if d == 0.0 {
                    return Err(Error::SingularShift { index: start });
                }
                dsigma[start] = libm::sqrt(d.abs());
                da[start] = sign(d);
                block_sizes.push(1);
                q_blocks.push(None);
            }
            PivotBlock::Two { start: s, d11, d21, d22 } => {
                let (lambda, q) = sym2_eig(d11, d21, d22);
                for (off, &lam) in lambda.iter().enumerate() {
                    if lam == 0.0 || !lam.is_finite() {
                        return Err(Error::SingularShift { index: s + off });
                    }
                    dsigma[s + off] = libm::sqrt(lam.abs());
                    da[s + off] = sign(lam);
                }
                block_sizes.push(2);
                q_blocks.push(Some(q));
            }
        }
    }
    Ok(SignedFactor { perm: f.perm, l: f.l, block_sizes, q_blocks, dsigma, da })
}

fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else {
        -1.0
    }
}

/// Eigendecomposition of `[[a, b], [b, c]]` as `Q diag(lambda) Q^T`, `Q`
/// returned row-major.
fn sym2_eig(a: f64, b: f64, c: f64) -> ([f64; 2], [f64; 4]) {
    if b == 0.0 {
        return ([a, c], [1.0, 0.0, 0.0, 1.0]);
    }
    let tau = (c - a) / (2.0 * b);
    let t = if tau >= 0.0 {
        1.0 / (tau + libm::hypot(1.0, tau))
    } else {
        -1.0 / (-tau + libm::hypot(1.0, tau))
    };
    let cs = 1.0 / libm::hypot(1.0, t);
    let sn = t * cs;
    ([c + t * b, a - t * b], [sn, cs, cs, -sn])
}

impl SignedFactor {
    pub fn n(&self) -> usize {
        self.perm.len()
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn l(&self) -> &Matrix {
        &self.l
    }

    pub fn dsigma(&self) -> &[f64] {
        &self.dsigma
    }

    pub fn da(&self) -> &[f64] {
        &self.da
    }

    pub fn block_sizes(&self) -> &[usize] {
        &self.block_sizes
    }

    /// Block-diagonal `Q` as a dense matrix.
    pub fn q_matrix(&self) -> Matrix {
        let mut q = Matrix::identity(self.n());
        let mut s = 0;
        for (size, blk) in self.block_sizes.iter().zip(&self.q_blocks) {
            if let Some([q00, q01, q10, q11]) = *blk {
                q[(s, s)] = q00;
                q[(s, s + 1)] = q01;
                q[(s + 1, s)] = q10;
                q[(s + 1, s + 1)] = q11;
            }
            s += size;
        }
        q
    }

    /// `Ca = P L Q Dsigma` as a dense matrix.
    pub fn ca_matrix(&self) -> Matrix {
        let n = self.n();
        let lq = self.l.matmul(&self.q_matrix()).expect("square factors");
        let mut ca = Matrix::zeros(n, n);
        for j in 0..n {
            for i in 0..n {
                ca[(self.perm[i], j)] = lq[(i, j)] * self.dsigma[j];
            }
        }
        ca
    }

    /// `Ca Da Ca^T`.
    pub fn reconstruct(&self) -> Matrix {
        let ca = self.ca_matrix();
        let mut cad = ca.clone();
        for (j, &s) in self.da.iter().enumerate() {
            cad.col_mut(j).iter_mut().for_each(|v| *v *= s);
        }
        cad.matmul(&ca.transpose()).expect("square factors")
    }

    /// Solves `Ca x = b` in place.
    pub fn solve_ca_in_place(&self, b: &mut [f64]) {
        let n = self.n();
        assert_eq!(b.len(), n, "right-hand side length");
        let mut y: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for j in 0..n {
            let yj = y[j];
            if yj != 0.0 {
                let col = self.l.col(j);
                for i in j + 1..n {
                    y[i] -= col[i] * yj;
                }
            }
        }
        self.apply_q_blocks(&mut y, true);
        for ((out, yi), ds) in b.iter_mut().zip(&y).zip(&self.dsigma) {
            *out = yi / ds;
        }
    }

    /// Solves `Ca^T x = b` in place.
    pub fn solve_ca_transpose_in_place(&self, b: &mut [f64]) {
        let n = self.n();
        assert_eq!(b.len(), n, "right-hand side length");
        let mut y: Vec<f64> = b.iter().zip(&self.dsigma).map(|(v, ds)| v / ds).collect();
        self.apply_q_blocks(&mut y, false);
        for j in (0..n).rev() {
            let col = self.l.col(j);
            let s: f64 = (j + 1..n).map(|i| col[i] * y[i]).sum();
            y[j] -= s;
        }
        for (i, &p) in self.perm.iter().enumerate() {
            b[p] = y[i];
        }
    }

    /// Solves `Ca X = R` column by column.
    pub fn solve_ca(&self, rhs: &Matrix) -> Result<Matrix> {
        self.solve_columns(rhs, Self::solve_ca_in_place)
    }

    /// Solves `Ca^T X = R` column by column.
    pub fn solve_ca_transpose(&self, rhs: &Matrix) -> Result<Matrix> {
        self.solve_columns(rhs, Self::solve_ca_transpose_in_place)
    }

    fn solve_columns(&self, rhs: &Matrix, solve: fn(&Self, &mut [f64])) -> Result<Matrix> {
        if rhs.nrows() != self.n() {
            return Err(Error::DimensionMismatch { expected: self.n(), found: rhs.nrows() });
        }
        let mut out = rhs.clone();
        for j in 0..out.ncols() {
            solve(self, out.col_mut(j));
        }
        Ok(out)
    }

    fn apply_q_blocks(&self, y: &mut [f64], transpose: bool) {
        let mut s = 0;
        for (size, blk) in self.block_sizes.iter().zip(&self.q_blocks) {
            if let Some([q00, q01, q10, q11]) = *blk {
                let (z0, z1) = (y[s], y[s + 1]);
                if transpose {
                    y[s] = q00 * z0 + q10 * z1;
                    y[s + 1] = q01 * z0 + q11 * z1;
                } else {
                    y[s] = q00 * z0 + q01 * z1;
                    y[s + 1] = q10 * z0 + q11 * z1;
                }
            }
            s += size;
        }
    }
}
