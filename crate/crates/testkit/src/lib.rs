//! Reference routines for tests. Nothing here calls into the factorization or
//! eigensolver code under test; only the plain `Matrix`/`SymMatrix` containers
//! are shared.

use dstrans_core::{Matrix, SymMatrix};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rand_distr::StandardNormal;

pub const U: f64 = 1.1102230246251565e-16;

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// Dense row-major copy of a matrix.
pub fn to_rows(m: &Matrix) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect()
}

/// Cyclic Jacobi eigenvalue iteration run to convergence. Returns eigenvalues
/// ascending and the matching eigenvector columns.
pub fn jacobi_eig(m: &Matrix) -> (Vec<f64>, Matrix) {
    let n = m.nrows();
    let mut a = to_rows(m);
    let mut v = vec![vec![0.0; n]; n];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        let diag: f64 = (0..n).map(|i| a[i][i] * a[i][i]).sum();
        if off <= 1e-34 * diag.max(f64::MIN_POSITIVE) || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q] == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for row in v.iter_mut() {
                    let vp = row[p];
                    let vq = row[q];
                    row[p] = c * vp - s * vq;
                    row[q] = s * vp + c * vq;
                }
            }
        }
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&i, &j| a[i][i].total_cmp(&a[j][j]));
    let vals = idx.iter().map(|&i| a[i][i]).collect();
    let vecs = Matrix::from_fn(n, n, |i, j| v[i][idx[j]]);
    (vals, vecs)
}

/// `||M||_2` through the Jacobi eigenvalues of `M^T M`.
pub fn norm2_exact(m: &Matrix) -> f64 {
    let g = gram(m);
    let (vals, _) = jacobi_eig(&g);
    vals.last().copied().unwrap_or(0.0).max(0.0).sqrt()
}

/// `||M||_2` of a symmetric matrix as its largest eigenvalue magnitude.
pub fn sym_norm2_exact(m: &Matrix) -> f64 {
    let (vals, _) = jacobi_eig(m);
    vals.iter().fold(0.0f64, |a, v| a.max(v.abs()))
}

/// A lower bound on `||M||_2`: the largest `||M x|| / ||x||` seen over `steps`
/// rounds of power iteration on `M^T M` from a Gaussian start.
pub fn norm2_lower_bound(m: &Matrix, steps: usize, seed: u64) -> f64 {
    let (rows, cols) = (m.nrows(), m.ncols());
    let mut x = gaussian_vec(&mut rng(seed), cols);
    let mut best = 0.0f64;
    for _ in 0..steps {
        let xn = vec_norm(&x);
        if xn == 0.0 {
            break;
        }
        let y: Vec<f64> = (0..rows).map(|i| (0..cols).map(|j| m[(i, j)] * x[j]).sum()).collect();
        best = best.max(vec_norm(&y) / xn);
        x = (0..cols).map(|j| (0..rows).map(|i| m[(i, j)] * y[i]).sum::<f64>() / xn).collect();
    }
    best
}

/// `M^T M` by triple loop.
pub fn gram(m: &Matrix) -> Matrix {
    let k = m.ncols();
    Matrix::from_fn(k, k, |i, j| (0..m.nrows()).map(|r| m[(r, i)] * m[(r, j)]).sum())
}

/// `A * B` by triple loop.
pub fn matmul(a: &Matrix, b: &Matrix) -> Matrix {
    assert_eq!(a.ncols(), b.nrows());
    Matrix::from_fn(a.nrows(), b.ncols(), |i, j| (0..a.ncols()).map(|k| a[(i, k)] * b[(k, j)]).sum())
}

pub fn frobenius(m: &Matrix) -> f64 {
    m.as_slice().iter().map(|v| v * v).sum::<f64>().sqrt()
}

pub fn vec_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn gaussian_matrix(rng: &mut StdRng, nrows: usize, ncols: usize) -> Matrix {
    Matrix::from_fn(nrows, ncols, |_, _| rng.sample(StandardNormal))
}

pub fn gaussian_vec(rng: &mut StdRng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

/// Symmetric matrix with standard normal lower-triangle entries.
pub fn random_symmetric(rng: &mut StdRng, n: usize) -> SymMatrix {
    let g = gaussian_matrix(rng, n, n);
    SymMatrix::from_lower(&g).unwrap()
}

/// Orthogonal matrix from modified Gram-Schmidt (applied twice) on a
/// Gaussian matrix.
pub fn random_orthogonal(rng: &mut StdRng, n: usize) -> Matrix {
    let g = gaussian_matrix(rng, n, n);
    let mut cols: Vec<Vec<f64>> = (0..n).map(|j| g.col(j).to_vec()).collect();
    for _ in 0..2 {
        for j in 0..n {
            for k in 0..j {
                let d: f64 = cols[j].iter().zip(&cols[k]).map(|(a, b)| a * b).sum();
                let ck = cols[k].clone();
                cols[j].iter_mut().zip(&ck).for_each(|(a, b)| *a -= d * b);
            }
            let nrm = vec_norm(&cols[j]);
            cols[j].iter_mut().for_each(|a| *a /= nrm);
        }
    }
    Matrix::from_fn(n, n, |i, j| cols[j][i])
}

/// `Q diag(d) Q^T` for a random orthogonal `Q`, built on the lower triangle.
pub fn symmetric_with_spectrum(rng: &mut StdRng, d: &[f64]) -> SymMatrix {
    let n = d.len();
    let q = random_orthogonal(rng, n);
    SymMatrix::from_lower_fn(n, |i, j| (0..n).map(|k| q[(i, k)] * d[k] * q[(j, k)]).sum())
        .unwrap()
}

/// SPD matrix with eigenvalues log-uniform in `[1, cond]`, endpoints included.
pub fn spd_with_condition(rng: &mut StdRng, n: usize, cond: f64) -> SymMatrix {
    let mut d: Vec<f64> = (0..n).map(|_| cond.powf(rng.gen::<f64>())).collect();
    if n >= 2 {
        d[0] = 1.0;
        d[1] = cond;
    }
    symmetric_with_spectrum(rng, &d)
}

/// `M M^T` for a Gaussian `n x r` factor `M`.
pub fn semidefinite_of_rank(rng: &mut StdRng, n: usize, r: usize) -> SymMatrix {
    let m = gaussian_matrix(rng, n, r);
    SymMatrix::from_lower_fn(n, |i, j| (0..r).map(|k| m[(i, k)] * m[(j, k)]).sum()).unwrap()
}

/// Eigenvalues of the definite pencil `(A, B)` through the Jacobi eigenvalues
/// of `B^{-1/2} A B^{-1/2}`, all formed from Jacobi decompositions.
pub fn pencil_eigenvalues(a: &SymMatrix, b: &SymMatrix) -> Vec<f64> {
    let n = a.n();
    let (bv, bq) = jacobi_eig(b.as_matrix());
    assert!(bv.iter().all(|&x| x > 0.0), "B must be positive definite");
    let s = Matrix::from_fn(n, n, |i, j| bq[(i, j)] / bv[j].sqrt());
    let m = matmul(&matmul(&s.transpose(), a.as_matrix()), &s);
    let sym = Matrix::from_fn(n, n, |i, j| 0.5 * (m[(i, j)] + m[(j, i)]));
    jacobi_eig(&sym).0
}
