//! Exact dense linear algebra over a field.

mod matrix;
mod subspace;

pub use matrix::{Matrix, Rref};
pub use subspace::{nullspace, quotient_reps, Subspace};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LinalgError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("matrix is singular")]
    Singular,
    #[error("subspace is not contained in the larger space")]
    NotContained,
}
