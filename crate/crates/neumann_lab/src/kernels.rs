//! Closed-form heat and Riesz kernels, classical and Neumann.
//!
//! The Neumann heat kernel on ℝⁿ is the free Gaussian plus its mirror image
//! across `{x_n = 0}`, switched off between the two half-spaces by
//! `H(x_n y_n)`. Riesz kernels follow from `∂_{x_l} Δ^{−1/2}` with
//! `Δ^{−1/2} = (1/Γ(½)) ∫₀^∞ e^{−tΔ} t^{−1/2} dt`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::error::{LabError, Result};
use crate::grid::{dist2, reflect_point};

/// Which generator the semigroup belongs to: the free Laplacian Δ or Δ_N.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Flavor {
    Classical,
    Neumann,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    PaperFormula,
    DerivedOracle,
}

/// Dimension-dependent Riesz constants.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelConstants {
    pub dimension: usize,
    /// `c_n` in `R_l(x,y) = c_n (x_l − y_l)/|x − y|^{n+1}`.
    pub riesz_normalization: f64,
    /// Constant in front of the reflected correction `K_{N,l}`.
    pub neumann_correction_constant: f64,
    pub provenance: Provenance,
}

impl KernelConstants {
    /// `c_n = −Γ((n+1)/2)/π^{(n+1)/2}`; the correction term is `R_l(x, x̃)`-shaped
    /// and carries the same constant.
    pub fn for_dimension(n: usize) -> KernelConstants {
        let a = (n as f64 + 1.0) / 2.0;
        let c = -gamma(a) / PI.powf(a);
        KernelConstants {
            dimension: n,
            riesz_normalization: c,
            neumann_correction_constant: c,
            provenance: Provenance::DerivedOracle,
        }
    }
}

/// The correction constant `2^{n−1}(4π)^{−n/2}(2−n)Γ(n/2−1)` as printed in the
/// source, kept for audit. `None` where it is undefined (n = 2: zero times a pole).
pub fn stated_correction_constant(n: usize) -> Option<f64> {
    let arg = n as f64 / 2.0 - 1.0;
    if arg <= 0.0 && arg.fract() == 0.0 {
        return None;
    }
    Some(2f64.powi(n as i32 - 1) / (4.0 * PI).powf(n as f64 / 2.0) * (2.0 - n as f64) * gamma(arg))
}

/// `H(s)`: 0 for s < 0, 1 for s ≥ 0.
pub fn heaviside(s: f64) -> f64 {
    if s < 0.0 {
        0.0
    } else {
        1.0
    }
}

fn check_time(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(LabError::NonPositiveTime(t))
    }
}

fn gaussian(t: f64, d2: f64, n: usize) -> f64 {
    (4.0 * PI * t).powf(-(n as f64) / 2.0) * (-d2 / (4.0 * t)).exp()
}

fn same_closed_half(x: &[f64], y: &[f64]) -> bool {
    heaviside(x[x.len() - 1] * y[y.len() - 1]) == 1.0
}

/// `p_t(x,y) = (4πt)^{−n/2} e^{−|x−y|²/4t}`.
pub fn classical_heat_kernel(t: f64, x: &[f64], y: &[f64]) -> Result<f64> {
    check_time(t)?;
    Ok(gaussian(t, dist2(x, y), x.len()))
}

/// `p_{t,Δ_N}(x,y) = [p_t(x,y) + p_t(x,ỹ)]·H(x_n y_n)`.
pub fn neumann_heat_kernel(t: f64, x: &[f64], y: &[f64]) -> Result<f64> {
    check_time(t)?;
    if !same_closed_half(x, y) {
        return Ok(0.0);
    }
    let n = x.len();
    Ok(gaussian(t, dist2(x, y), n) + gaussian(t, dist2(x, &reflect_point(y)), n))
}

/// `∂_t` of the chosen heat kernel; each Gaussian contributes `G·(|z|²/4t² − n/2t)`.
pub fn heat_kernel_time_derivative(t: f64, x: &[f64], y: &[f64], flavor: Flavor) -> Result<f64> {
    check_time(t)?;
    let n = x.len();
    let term = |d2: f64| gaussian(t, d2, n) * (d2 / (4.0 * t * t) - n as f64 / (2.0 * t));
    match flavor {
        Flavor::Classical => Ok(term(dist2(x, y))),
        Flavor::Neumann => {
            if !same_closed_half(x, y) {
                return Ok(0.0);
            }
            Ok(term(dist2(x, y)) + term(dist2(x, &reflect_point(y))))
        }
    }
}

/// `∇_x p_{t,Δ_N}(x,y)`. Between the two half-spaces the kernel vanishes
/// identically and the gradient is the zero vector.
pub fn heat_kernel_gradient(t: f64, x: &[f64], y: &[f64]) -> Result<Vec<f64>> {
    check_time(t)?;
    let n = x.len();
    if !same_closed_half(x, y) {
        return Ok(vec![0.0; n]);
    }
    let yr = reflect_point(y);
    let g1 = gaussian(t, dist2(x, y), n);
    let g2 = gaussian(t, dist2(x, &yr), n);
    Ok((0..n)
        .map(|i| -((x[i] - y[i]) * g1 + (x[i] - yr[i]) * g2) / (2.0 * t))
        .collect())
}

fn check_axis(l: usize, n: usize) -> Result<()> {
    if (1..=n).contains(&l) {
        Ok(())
    } else {
        Err(LabError::InvalidArgument(format!("axis {l} not in 1..={n}")))
    }
}

/// Classical part `R_l(x,y)` and reflected correction `K_{N,l}(x,y)`, axis `l` counted from 1.
pub fn riesz_kernel_components(l: usize, x: &[f64], y: &[f64]) -> Result<(f64, f64)> {
    let n = x.len();
    check_axis(l, n)?;
    let d2 = dist2(x, y);
    if d2 == 0.0 {
        return Err(LabError::Singular);
    }
    let k = KernelConstants::for_dimension(n);
    let p = (n as f64 + 1.0) / 2.0;
    let r = k.riesz_normalization * (x[l - 1] - y[l - 1]) / d2.powf(p);
    let yr = reflect_point(y);
    let num = x[l - 1] - yr[l - 1];
    let kc = k.neumann_correction_constant * num / dist2(x, &yr).powf(p);
    Ok((r, kc))
}

/// `R_{N,l}(x,y) = (R_l + K_{N,l})(x,y)·H(x_n y_n)`.
pub fn neumann_riesz_kernel(l: usize, x: &[f64], y: &[f64]) -> Result<f64> {
    let (r, k) = riesz_kernel_components(l, x, y)?;
    Ok((r + k) * heaviside(x[x.len() - 1] * y[y.len() - 1]))
}

/// Numerical value of `(1/Γ(½)) ∫₀^∞ ∂_{x_l} p_{t,Δ_N}(x,y) t^{−1/2} dt`.
///
/// Substitutes `t = e^u` and applies the trapezoid rule in `u`; the
/// integrand decays doubly exponentially as `u → −∞` and exponentially as
/// `u → ∞`, so the rule converges geometrically in the step.
pub fn riesz_time_integral(l: usize, x: &[f64], y: &[f64]) -> Result<f64> {
    let n = x.len();
    check_axis(l, n)?;
    if !same_closed_half(x, y) {
        return Ok(0.0);
    }
    let near = dist2(x, y);
    if near == 0.0 {
        return Err(LabError::Singular);
    }
    let far = dist2(x, &reflect_point(y));
    let lo = (near / 3000.0).ln();
    let hi = (far * 1e14).ln();
    let step = 0.01;
    let steps = ((hi - lo) / step).ceil() as usize;
    let mut sum = 0.0;
    for k in 0..=steps {
        let u = lo + k as f64 * step;
        let t = u.exp();
        let g = heat_kernel_gradient(t, x, y)?[l - 1];
        let w = if k == 0 || k == steps { 0.5 } else { 1.0 };
        sum += w * g * t.sqrt();
    }
    Ok(sum * step / PI.sqrt())
}
