//! Exact rational scalars and matrices, integer matrices, exact phases and
//! the complex matrix carrier used by the numeric kernels.

mod cmatrix;
mod int_matrix;
mod phase;
mod rat_matrix;
mod rational;

pub use cmatrix::{kron, max_abs, max_abs_diff, CMatrix};
pub use int_matrix::IntMatrix;
pub use phase::Phase;
pub use rat_matrix::{RatMatrix, SkewMatrix};
pub use rational::{format_rational, parse_rational, rat, rational_to_f64, Rational};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("matrix is not square ({rows}x{cols})")]
    NonSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is not skew-symmetric")]
    NotSkew,
    #[error("entry is not an integer: {0}")]
    NotInteger(String),
    #[error("cannot parse rational {0:?}")]
    ParseRational(String),
    #[error("ragged matrix rows")]
    Ragged,
}
