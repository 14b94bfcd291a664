use alloc::vec::Vec;

use super::sym_swap_lower;
use crate::error::{Error, Result};
use crate::matrix::{Matrix, SymMatrix};

/// Pivot acceptance constant `(1 + sqrt(17)) / 8`.
const ALPHA: f64 = 0.6403882032022076;

/// One diagonal block of `D` in `P^T A P = L D L^T`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PivotBlock {
    One { start: usize, d: f64 },
    /// Symmetric block `[[d11, d21], [d21, d22]]` occupying `start, start + 1`.
    Two { start: usize, d11: f64, d21: f64, d22: f64 },
}

impl PivotBlock {
    pub fn start(&self) -> usize {
        match *self {
            PivotBlock::One { start, .. } | PivotBlock::Two { start, .. } => start,
        }
    }

    pub fn size(&self) -> usize {
        match self {
            PivotBlock::One { .. } => 1,
            PivotBlock::Two { .. } => 2,
        }
    }
}

/// `P^T A P = L D L^T` with rook pivoting.
///
/// `perm[i]` is the original index placed at position `i`, so that
/// `(P^T A P)(i, j) = A(perm[i], perm[j])`.
#[derive(Clone, Debug, PartialEq)]
pub struct LdltFactor {
    pub perm: Vec<usize>,
    /// Unit lower triangular.
    pub l: Matrix,
    pub blocks: Vec<PivotBlock>,
}

impl LdltFactor {
    pub fn n(&self) -> usize {
        self.perm.len()
    }

    /// Block diagonal `D` as a dense matrix.
    pub fn d_matrix(&self) -> Matrix {
        let mut d = Matrix::zeros(self.n(), self.n());
        for blk in &self.blocks {
            match *blk {
                PivotBlock::One { start, d: v } => d[(start, start)] = v,
                PivotBlock::Two { start: s, d11, d21, d22 } => {
                    d[(s, s)] = d11;
                    d[(s + 1, s)] = d21;
                    d[(s, s + 1)] = d21;
                    d[(s + 1, s + 1)] = d22;
                }
            }
        }
        d
    }

    /// `P L D L^T P^T`.
    pub fn reconstruct(&self) -> Matrix {
        let n = self.n();
        let ld = self.l.matmul(&self.d_matrix()).expect("square factors");
        let core = ld.matmul(&self.l.transpose()).expect("square factors");
        let mut out = Matrix::zeros(n, n);
        for j in 0..n {
            for i in 0..n {
                out[(self.perm[i], self.perm[j])] = core[(i, j)];
            }
        }
        out
    }

    /// Overwrites `x` with `A^{-1} x`.
    pub fn solve_in_place(&self, x: &mut [f64]) {
        let n = self.n();
        assert_eq!(x.len(), n, "right-hand side length");
        let mut y: Vec<f64> = self.perm.iter().map(|&p| x[p]).collect();
        for j in 0..n {
            let yj = y[j];
            if yj != 0.0 {
                let col = self.l.col(j);
                for i in j + 1..n {
                    y[i] -= col[i] * yj;
                }
            }
        }
        for blk in &self.blocks {
            match *blk {
                PivotBlock::One { start, d } => y[start] /= d,
                PivotBlock::Two { start: s, d11, d21, d22 } => {
                    let (y0, y1) = solve_2x2(d11, d21, d22, y[s], y[s + 1]);
                    y[s] = y0;
                    y[s + 1] = y1;
                }
            }
        }
        for j in (0..n).rev() {
            let col = self.l.col(j);
            let s: f64 = (j + 1..n).map(|i| col[i] * y[i]).sum();
            y[j] -= s;
        }
        for (i, &p) in self.perm.iter().enumerate() {
            x[p] = y[i];
        }
    }
}

/// Solves `[[a, b], [b, c]] z = r` through the same scaled inverse the
/// factorization uses.
fn solve_2x2(a: f64, b: f64, c: f64, r0: f64, r1: f64) -> (f64, f64) {
    let ak = c / b;
    let akp1 = a / b;
    let t = 1.0 / (ak * akp1 - 1.0);
    let bk = r0 / b;
    let bkp1 = r1 / b;
    ((ak * bk - bkp1) * t, (akp1 * bkp1 - bk) * t)
}

/// Rook-pivoted `LDL^T` of a symmetric matrix.
///
/// At each step the pivot search alternates between column and row maxima
/// until it finds a diagonal entry that passes the `alpha` test or an
/// off-diagonal entry that is the largest in both its row and column, which
/// then anchors a 2x2 block. Entries of `L` are bounded by `1 / (1 - alpha)`.
/// Ties go to the lowest index.
pub fn ldlt_rook(a_in: &SymMatrix) -> Result<LdltFactor> {
    let n = a_in.n();
    let mut a = a_in.as_matrix().clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut blocks = Vec::new();

    let mut k = 0;
    while k < n {
        let absakk = a[(k, k)].abs();
        let (mut imax, mut colmax) = column_max(&a, k, k);

        if absakk == 0.0 && colmax == 0.0 {
            return Err(Error::SingularShift { index: k });
        }

        let (step, kp, p);
        if absakk >= ALPHA * colmax {
            step = 1;
            kp = k;
            p = k;
        } else {
            let mut pp = k;
            loop {
                let (jmax, rowmax) = row_max_excluding(&a, k, imax);
                if a[(imax, imax)].abs() >= ALPHA * rowmax {
                    step = 1;
                    kp = imax;
                    p = pp;
                    break;
                } else if pp == jmax || rowmax <= colmax {
                    step = 2;
                    kp = imax;
                    p = pp;
                    break;
                }
                pp = imax;
                colmax = rowmax;
                imax = jmax;
            }
        }

        if step == 1 {
            sym_swap_lower(&mut a, k, k, kp);
            perm.swap(k, kp);
            let d = a[(k, k)];
            for i in k + 1..n {
                a[(i, k)] /= d;
            }
            for j in k + 1..n {
                let w = a[(j, k)] * d;
                if w == 0.0 {
                    continue;
                }
                for i in j..n {
                    let lik = a[(i, k)];
                    a[(i, j)] -= lik * w;
                }
            }
            blocks.push(PivotBlock::One { start: k, d });
            k += 1;
        } else {
            // The block is formed from indices p and kp: move p to k, then kp to k + 1.
            if p != k {
                sym_swap_lower(&mut a, k, k, p);
                perm.swap(k, p);
            }
            let kp = if kp == k { p } else { kp };
            sym_swap_lower(&mut a, k, k + 1, kp);
            perm.swap(k + 1, kp);

            let d11 = a[(k, k)];
            let d21 = a[(k + 1, k)];
            let d22 = a[(k + 1, k + 1)];
            let ak = d22 / d21;
            let akp1 = d11 / d21;
            let t = 1.0 / (ak * akp1 - 1.0);
            let scale = t / d21;
            for j in k + 2..n {
                let wk = scale * (ak * a[(j, k)] - a[(j, k + 1)]);
                let wkp1 = scale * (akp1 * a[(j, k + 1)] - a[(j, k)]);
                for i in j..n {
                    let update = a[(i, k)] * wk + a[(i, k + 1)] * wkp1;
                    a[(i, j)] -= update;
                }
                a[(j, k)] = wk;
                a[(j, k + 1)] = wkp1;
            }
            blocks.push(PivotBlock::Two { start: k, d11, d21, d22 });
            k += 2;
        }
    }

    let mut l = Matrix::identity(n);
    for blk in &blocks {
        let s = blk.start();
        let first_free = s + blk.size();
        for c in s..first_free {
            for i in first_free..n {
                l[(i, c)] = a[(i, c)];
            }
        }
    }
    Ok(LdltFactor { perm, l, blocks })
}

/// Largest `|a(i, col)|` for `i > row` in the active lower triangle.
fn column_max(a: &Matrix, row: usize, col: usize) -> (usize, f64) {
    let mut imax = row;
    let mut vmax = 0.0;
    for i in row + 1..a.nrows() {
        let v = a[(i, col)].abs();
        if v > vmax {
            vmax = v;
            imax = i;
        }
    }
    (imax, vmax)
}

/// Largest off-diagonal magnitude in row/column `r` of the active block `k..n`.
fn row_max_excluding(a: &Matrix, k: usize, r: usize) -> (usize, f64) {
    let mut jmax = r;
    let mut vmax = 0.0;
    for j in k..a.nrows() {
        if j == r {
            continue;
        }
        let v = if j < r { a[(r, j)] } else { a[(j, r)] }.abs();
        if v > vmax {
            vmax = v;
            jmax = j;
        }
    }
    (jmax, vmax)
}
