//! Numerical kernels: extended-exponent complex numbers, a tridiagonal
//! eigensolver, atomic measures and interval sets.

pub mod fit;
pub mod intervals;
pub mod measure;
pub mod scaled;
pub mod tridiag;

pub use fit::{geometric, ls_slope};
pub use intervals::IntervalSet;
pub use measure::SpectralMeasure;
pub use scaled::{log_norm, log_sum_exp, ScaledComplex};
pub use tridiag::{sturm_count, sturm_counts, tridiag_eigenvalues};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericsError {
    #[error("binary exponent out of range")]
    ExponentOverflow,
    #[error("logarithm of zero")]
    LogOfZero,
    #[error("empty set")]
    EmptySet,
    #[error("measure is not a probability measure")]
    NotProbability,
    #[error("evaluation point coincides with atom {0}")]
    AtAtom(f64),
    #[error("invalid measure: {0}")]
    InvalidMeasure(String),
    #[error("i/o: {0}")]
    Io(String),
}
