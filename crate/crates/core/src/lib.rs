//! Desk-scale model of matrix-valued functions on a periodic dyadic grid.
//!
//! The crate models `L^∞(T^d) ⊗ M_m` with weighted traces and provides the
//! machinery around the square function built from `M_k − E_k`: Cuculescu
//! projections, the noncommutative Calderón–Zygmund decomposition, the
//! ζ-projection, truncated ball averages, row/column sequence norms and a
//! verifier that measures every inequality against its bound.

pub mod cz;
pub mod error;
pub mod field;
pub mod geometry;
pub mod matrix;
pub mod operators;
pub mod rng;
pub mod seqnorm;
pub mod suite;
pub mod tolerances;
pub mod verifier;
pub mod weights;

pub use error::{Error, Result};
pub use field::MatrixField;
pub use geometry::{CellSet, DyadicCube, GridSpec};
pub use matrix::{CMatrix, HermitianMatrix, Projection};
pub use weights::Weight;
