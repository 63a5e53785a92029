//! 2×2 complex matrix loops `λ ↦ X(λ)`, held either as truncated Laurent
//! series or as samples on the unit circle.

mod grid;
mod laurent;
mod mat2;

pub use grid::LambdaGrid;
pub use laurent::{LaurentLoop, Truncation};
pub use mat2::Mat2;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LoopError {
    #[error("evaluation at λ = 0 of a loop with negative powers")]
    PoleAtZero,
    #[error("truncation discarded mass {discarded:.3e} above tolerance {tolerance:.3e}")]
    TruncationOverflow { discarded: f64, tolerance: f64 },
    #[error("grid of {m} samples cannot resolve degree {degree} (need m >= 2N+2)")]
    GridTooSmall { m: usize, degree: usize },
    #[error("grid size {0} is not a power of two >= 4")]
    BadGridSize(usize),
    #[error("expected {expected} samples, got {got}")]
    SampleCount { expected: usize, got: usize },
}
