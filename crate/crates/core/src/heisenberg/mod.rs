//! The σ₂ equivalence bimodule `S(R × Z^q)` between `A_θ` (acting on the
//! right) and `A_{σ₂(θ)}` (acting on the left), sampled on a finite grid.
//!
//! Operators are Weyl operators `W_z f(t,p) = e(b·t + v·p) f(t + a, p + u)`
//! for `z = (a, b, u, v) ∈ R² × Z^q × R^q`. They satisfy
//! `W_z W_{z'} = e(z·J₂z') W_{z'} W_z`. The right action is `R_x = W_{Tx}`, the
//! left action `L_x = W_{Sx}`.

mod embeddings;
mod grid;
mod verify;

pub use embeddings::{build_embeddings, Embeddings};
pub use grid::{gaussian, GridSpec, HeisenbergModule, ModuleGrid, WeylParams};
pub use verify::{verify_module, ModuleReport, Residuals};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModuleError {
    #[error("theta_11 is singular")]
    Theta11Singular,
    #[error("module needs n >= 2, got {0}")]
    DimensionTooSmall(usize),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("support leaves the safe region: {0}")]
    BoundaryViolation(String),
    #[error("embedding invariant violated: {0}")]
    InvariantViolated(String),
}
