//! Pinned acceptance tolerances.

/// Semigroup and `Q` reflection identities, relative to `‖f‖_∞`.
pub const REFLECTION_HEAT: f64 = 1e-8;
/// Riesz reflection identity, relative L² on the upper half.
pub const REFLECTION_RIESZ: f64 = 5e-3;
/// Maximal-function half identity, relative.
pub const HALF_IDENTITY: f64 = 0.02;
/// Area-function pointwise identity, relative.
pub const AREA_IDENTITY: f64 = 1e-6;
/// Samples with `S` below this are skipped in the area identity.
pub const AREA_FLOOR: f64 = 1e-10;
/// Sampled points for the Gaussian bound: no violations allowed.
pub const GAUSSIAN_VIOLATIONS: f64 = 0.0;
/// Closed-form gradient against finite differences, relative.
pub const GRADIENT_FD: f64 = 1e-6;
/// Numerical time integral against the closed-form Riesz kernel, relative.
pub const RIESZ_TIME_INTEGRAL: f64 = 1e-4;
/// One-dimensional closed form against `−(1/π)(1/(x−y) + 1/(x+y))`.
pub const RIESZ_CLOSED_FORM_1D: f64 = 1e-10;
/// Neumann BMO norm of the half-space step.
pub const STEP_BMO_NEUMANN: f64 = 1e-6;
/// Classical BMO norm of the half-space step, lower bound.
pub const STEP_BMO_CLASSICAL: f64 = 0.4;
/// Relative change of the classical counterexample norm from L = 16 to 32.
pub const COUNTEREXAMPLE_PLATEAU: f64 = 0.05;
/// Spread (max/min − 1) of the per-doubling growth of the Neumann counterexample norm.
pub const COUNTEREXAMPLE_SLOPE_SPREAD: f64 = 0.10;
/// Spread (max/min − 1) of `two_bump_h1_norm(M) / log M`.
pub const TWO_BUMP_SPREAD: f64 = 0.25;
/// Allowed deviation of the fitted Riesz-mass exponent from `−n`.
pub const RIESZ_MASS_SLOPE: f64 = 0.15;
/// Relative deviation from `2/(πM)` at `M = 256`.
pub const RIESZ_MASS_VALUE: f64 = 0.10;
/// Residual integral of an atom factorization.
pub const RESIDUAL_MEAN: f64 = 1e-8;
/// Largest allowed per-level residual ratio.
pub const FACTOR_RATIO: f64 = 0.8;
/// Reconstruction `f − Σ λ Π − E_K` in L².
pub const RECONSTRUCTION: f64 = 1e-7;
/// Duality pairing, relative to the pairing scale.
pub const DUALITY: f64 = 1e-8;
/// Commutator norm and Neumann BMO norm for the half-space step.
pub const STEP_COMMUTATOR: f64 = 1e-4;
/// A constant fitted on one sweep must hold on a disjoint sweep with this headroom.
pub const FIT_HEADROOM: f64 = 1.5;
/// Max/min of a constant fitted separately on several families.
pub const FIT_STABILITY: f64 = 2.0;
