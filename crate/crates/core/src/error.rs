use core::fmt;

use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix contains a non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("matrix not positive semidefinite: no positive pivot at step 1")]
    NotPositiveSemidefinite,

    #[error("B not positive definite (pivot {index} is {pivot:e}); standard method inapplicable")]
    NotPositiveDefinite { index: usize, pivot: f64 },

    #[error("A - sigma B numerically singular at pivot {index}; choose a different shift")]
    SingularShift { index: usize },

    /// `etax` is infinite when `A - sigma B` has an exactly zero pivot.
    #[error(
        "the given sigma failed to provide a suitable bound on eta*||X||_2: {}",
        GuardDetail(*.etax, *.etax_max)
    )]
    EtaXGuard { etax: f64, etax_max: f64 },

    #[error("symmetric QR iteration failed to converge at index {index}")]
    NoConvergence { index: usize },

    #[error("vector must be nonzero")]
    ZeroVector,

    #[error("norm estimate of {which} is zero")]
    ZeroNorm { which: &'static str },

    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),
}

struct GuardDetail(f64, f64);

impl fmt::Display for GuardDetail {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_infinite() {
            write!(f, "A - sigma B is exactly singular; choose a different shift")
        } else {
            write!(f, "{:e} > {:e}", self.0, self.1)
        }
    }
}
