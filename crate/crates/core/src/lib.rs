//! Dense solver for the symmetric semidefinite generalized eigenvalue problem
//! `beta * A v = alpha * B v` based on a shift-and-invert spectral
//! transformation.
//!
//! The pencil is shifted to `A - sigma B = Ca Da Ca^T` (rook-pivoted LDL^T with
//! the block diagonal split into signs and square roots) and `B = Cb Cb^T`
//! (truncating pivoted Cholesky). The standard symmetric problem
//! `W = X^T Da X` with `X = Ca^{-1} Cb` is solved and mapped back to pairs
//! `(1 + sigma theta, theta)` with eigenvectors from `Ca^T V = Da X U`.
//!
//! The crate is `no_std` and only needs `alloc`. Everything is `f64`.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod error;
pub mod factor;
pub mod matrix;
pub mod residual;
pub mod spectral;
pub mod symeig;

pub use error::{Error, Result};
pub use factor::{
    ldlt_rook, pivoted_cholesky, pivoted_cholesky_with_tol, to_signed_factor, LdltFactor,
    PivotBlock, SemidefFactor, SignedFactor, XFactor,
};
pub use matrix::{
    norm2_estimate, norm2_estimate_rect, shifted_subtract, sym_matvec, Matrix, Norm2Estimate,
    NormSettings, SymMatrix,
};
pub use residual::{
    backward_error_pair, best_possible_residual, relative_residual, residual_vector,
    smallest_singular_value,
    PencilNorms, ResidualRecord, RESIDUAL_FLOOR,
};
pub use spectral::{
    form_w, shift_diagnostics, sigma_from_scaled, spectral_trans_eig, spectral_trans_eig_with,
    standard_cholesky_eig, EigenPair, FactoredPencil, ScaledShift, ShiftDiagnostics,
    SpectralOptions, SpectralResult, StandardResult,
};
pub use symeig::{sym_eig, tql_implicit, tridiagonalize, EigDecomp, Tridiagonal};

/// Unit roundoff for IEEE double precision, `2^-53`.
pub const UNIT_ROUNDOFF: f64 = 1.1102230246251565e-16;
