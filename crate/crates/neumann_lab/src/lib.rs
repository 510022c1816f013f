//! Numerical harmonic analysis for the Neumann Laplacian `Δ_N` on ℝⁿ, n ∈ {1, 2}.
//!
//! `Δ_N` acts on each half-space `ℝⁿ_±` separately with a zero normal
//! derivative on `{x_n = 0}`. The crate evaluates its heat semigroup and
//! Riesz transforms on cell-centered grids, estimates Hardy-space and BMO
//! norms in several equivalent forms, and runs the iterative weak
//! factorization of `H¹_{Δ_N}` through the bilinear forms `Π_l`.

pub mod atoms;
pub mod error;
pub mod factorization;
pub mod functionals;
pub mod grid;
pub mod kernels;
pub mod operators;
mod simd;

pub use error::{LabError, Result};
pub use grid::{Ball, Grid, GridFunction, Half, Norm};
pub use kernels::{Flavor, KernelConstants};
pub use operators::OperatorConfig;
