use dstrans_core::{norm2_estimate, NormSettings, SymMatrix};

use crate::error::{CliError, Result};

/// Adds `exp(-0.02 (n - k + 1)) ||B0||_2` to the `k`-th diagonal entry
/// (1-based `k`), leaving off-diagonals alone.
pub fn modify_mass_matrix(b0: &SymMatrix, norms: NormSettings) -> Result<SymMatrix> {
    let norm = norm2_estimate(b0, norms.tol, norms.max_iter).value;
    if norm == 0.0 {
        return Err(CliError::ZeroMassMatrix);
    }
    let n = b0.n();
    let shift = |k: usize| (-0.02 * (n - k) as f64).exp() * norm;
    Ok(SymMatrix::from_lower_fn(n, |i, j| {
        if i == j {
            b0.get(i, i) + shift(i)
        } else {
            b0.get(i, j)
        }
    })?)
}
