//! Weak factorization of `H¹_{Δ_N}` through `Π_l(h, g) = h·R_{N,l}g − g·R*_{N,l}h`.
//!
//! A mean-zero atom `a` on `B(x₀, r)` is approximated by one `Π_l(h, g)` with
//! `g` the indicator of a far cube at distance `M r`; the residual is again a
//! sum of small atoms, so repeating on it converges geometrically.

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::atoms::{haar_atomic_decomposition, WeakAtom};
use crate::error::{LabError, Result};
use crate::functionals::{h1_norm, Characterization, ScaleGrid};
use crate::grid::{cube_indicator, integrate, norm, write_atomic, Grid, GridFunction, Norm};
use crate::kernels::{neumann_riesz_kernel, Flavor};
use crate::operators::{riesz_at_point, LocalRiesz, OperatorConfig};

/// Residual H¹ norm below which the iteration stops.
pub const STOP_RESIDUAL: f64 = 1e-6;

/// How the partner `h` of an atom is built.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HChoice {
    /// `h = a / R g(x₀) + β χ`, with `β` chosen so `⟨h, R g⟩ = 0`. The
    /// residual then has zero mean on each of the two cubes separately.
    #[default]
    Balanced,
    /// `h = a / R g(x₀)` only.
    Verbatim,
}

/// One factor pair `(g, h)` with its geometry.
#[derive(Clone, Debug)]
pub struct FactorPair {
    pub g: GridFunction,
    pub h: GridFunction,
    pub l: usize,
    pub m: usize,
    pub x0: Vec<f64>,
    pub y0: Vec<f64>,
    /// Atom ball radius.
    pub r: f64,
    /// Half-side of the cubes carrying `g` and `h`.
    pub half_side: f64,
    /// `R_{N,l} g (x₀)`.
    pub riesz_mass: f64,
}

impl FactorPair {
    /// `‖g‖₂ ‖h‖₂`.
    pub fn cost(&self) -> f64 {
        norm(&self.g, Norm::L2) * norm(&self.h, Norm::L2)
    }

    /// `‖g‖₂‖h‖₂ / Mⁿ`.
    pub fn cost_constant(&self) -> f64 {
        self.cost() / (self.m as f64).powi(self.g.grid.dimension as i32)
    }

    /// Smallest `C` with `|W| ≤ C/(M rⁿ)·(χ_{x₀} + χ_{y₀})` on every sample;
    /// infinite if `W` is nonzero off both cubes.
    pub fn envelope_constant(&self, residual: &GridFunction) -> f64 {
        let g = residual.grid;
        let scale = self.m as f64 * self.r.powi(g.dimension as i32);
        let cx = cube_indicator(g, &self.x0, self.half_side);
        let cy = cube_indicator(g, &self.y0, self.half_side);
        let peak = residual.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let mut c = 0.0f64;
        for i in 0..g.len() {
            let w = residual.values[i].abs();
            let env = cx.values[i] + cy.values[i];
            if env > 0.0 {
                c = c.max(w * scale / env);
            } else if w > 1e-12 * peak {
                return f64::INFINITY;
            }
        }
        c
    }
}

/// Smallest power of two `M > 10` with `log₂ M / M < ε`.
pub fn select_m(epsilon: f64) -> Result<usize> {
    if !(epsilon > 0.0) {
        return Err(LabError::InvalidArgument(format!("epsilon must be positive, got {epsilon}")));
    }
    let mut m: usize = 16;
    while (m as f64).log2() / m as f64 >= epsilon {
        m = m.checked_mul(2).ok_or_else(|| LabError::InvalidArgument("epsilon too small".into()))?;
    }
    Ok(m)
}

/// Centre of the far cube: offset `M·s` per axis, toward the hyperplane on
/// the normal axis and toward the origin on the others, flipped when that
/// leaves the half-space or the box.
fn place_partner(grid: &Grid, x0: &[f64], s: f64, m: usize) -> Result<Vec<f64>> {
    let n = grid.dimension;
    let big_l = grid.half_width;
    let off = m as f64 * s;
    let tol = 1e-12 * big_l;
    let mut y0 = Vec::with_capacity(n);
    for (i, &c) in x0.iter().enumerate() {
        let sgn = if c >= 0.0 { 1.0 } else { -1.0 };
        let a = c.abs();
        let fits = |v: f64| v.abs() + s <= big_l + tol && (i + 1 < n || v.abs() - s >= -tol);
        let near = if i + 1 == n { sgn * (a - off) } else { c - sgn * off };
        let far = if i + 1 == n { sgn * (a + off) } else { c + sgn * off };
        let pick = if fits(near) && (i + 1 < n || near * sgn > 0.0) {
            near
        } else if fits(far) {
            far
        } else {
            return Err(LabError::Placement(format!(
                "partner cube at distance {off} from {x0:?} does not fit in a box of half-width {big_l}; enlarge L"
            )));
        };
        y0.push(pick);
    }
    Ok(y0)
}

/// Factors one atom as `a ≈ Π_l(h, g)`; returns the pair and `W = a − Π_l(h, g)`.
pub fn approx_factor_atom(
    a: &WeakAtom,
    epsilon: f64,
    l: usize,
    choice: HChoice,
    cfg: &OperatorConfig,
) -> Result<(FactorPair, GridFunction)> {
    let riesz = LocalRiesz::new(a.grid, l, cfg)?;
    factor_with(&riesz, a, epsilon, l, choice, cfg)
}

fn factor_with(
    riesz: &LocalRiesz,
    a: &WeakAtom,
    epsilon: f64,
    l: usize,
    choice: HChoice,
    cfg: &OperatorConfig,
) -> Result<(FactorPair, GridFunction)> {
    let grid = a.grid;
    let n = grid.dimension;
    let m = select_m(epsilon)?;
    let r = a.ball.radius;
    let s = r / (n as f64).sqrt();
    let mut x0 = a.ball.center.clone();
    if x0[n - 1] == 0.0 {
        x0[n - 1] = r / 100.0;
    }
    let y0 = place_partner(&grid, &x0, s, m)?;
    let g = cube_indicator(grid, &y0, s);
    let mass = riesz_at_point(&g, l, &x0, cfg)?;
    if mass == 0.0 || !mass.is_finite() {
        return Err(LabError::Singular);
    }
    let dense = a.dense();
    let mut h = dense.scale(1.0 / mass);
    if choice == HChoice::Balanced {
        let chi = cube_indicator(grid, &x0, s);
        let mut targets: Vec<usize> = (0..grid.len()).filter(|&i| chi.values[i] != 0.0 || h.values[i] != 0.0).collect();
        targets.dedup();
        let rg = riesz.eval(&g, false, &targets);
        let (mut hr, mut cr) = (0.0, 0.0);
        for (&i, v) in targets.iter().zip(&rg) {
            hr += h.values[i] * v;
            cr += chi.values[i] * v;
        }
        if cr == 0.0 {
            return Err(LabError::Singular);
        }
        h.axpy(-hr / cr, &chi);
    }
    let pi = riesz.pi_form(&h, &g)?;
    let w = dense.sub(&pi);
    let mean = integrate(&w);
    let scale = integrate(&dense.map(f64::abs)).max(1.0);
    if mean.abs() > 1e-8 * scale {
        return Err(LabError::InvalidArgument(format!("residual lost its cancellation: ∫W = {mean:e}")));
    }
    let pair = FactorPair { g, h, l, m, x0, y0, r, half_side: s, riesz_mass: mass };
    Ok((pair, w))
}

/// `|R_{N,l} χ_{B(y₀,r)} (x₀)|` by fine quadrature over the ball, with
/// `x₀ = 10 M r e_n` and `y₀ = x₀ − (M r/√n)(1,…,1)`.
pub fn riesz_mass(m: f64, r: f64, l: usize, n: usize) -> Result<f64> {
    if !(m > 10.0) || !(r > 0.0) || !(1..=2).contains(&n) || !(1..=n).contains(&l) {
        return Err(LabError::InvalidArgument(format!("riesz_mass(M={m}, r={r}, l={l}, n={n})")));
    }
    let mut x0 = vec![0.0; n];
    x0[n - 1] = 10.0 * m * r;
    let off = m * r / (n as f64).sqrt();
    let y0: Vec<f64> = x0.iter().map(|c| c - off).collect();
    let mut acc = 0.0;
    if n == 1 {
        let q = 4000;
        let dy = 2.0 * r / q as f64;
        for k in 0..q {
            let y = y0[0] - r + (k as f64 + 0.5) * dy;
            acc += neumann_riesz_kernel(l, &x0, &[y])? * dy;
        }
    } else {
        let (qr, qt) = (400, 256);
        let dr = r / qr as f64;
        let dt = std::f64::consts::TAU / qt as f64;
        for i in 0..qr {
            let rho = (i as f64 + 0.5) * dr;
            for j in 0..qt {
                let th = j as f64 * dt;
                let y = [y0[0] + rho * th.cos(), y0[1] + rho * th.sin()];
                acc += neumann_riesz_kernel(l, &x0, &y)? * rho * dr * dt;
            }
        }
    }
    Ok(acc.abs())
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    let k = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / k;
    let my = ly.iter().sum::<f64>() / k;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// Riesz mass over several `M` and the fitted exponent of its `M`-scaling.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RieszMassFit {
    pub ms: Vec<f64>,
    pub values: Vec<f64>,
    pub slope: f64,
}

pub fn riesz_mass_scaling(ms: &[f64], r: f64, l: usize, n: usize) -> Result<RieszMassFit> {
    let values = ms.iter().map(|&m| riesz_mass(m, r, l, n)).collect::<Result<Vec<_>>>()?;
    Ok(RieszMassFit { ms: ms.to_vec(), slope: loglog_slope(ms, &values), values })
}

/// `h1_norm(χ_{B(x₀,r)} − χ_{B(y₀,r)}, max)` for `y₀ = 2r e_n`, `x₀ = y₀ + M r e_n`.
pub fn two_bump_h1_norm(m: f64, r: f64, grid: Grid) -> Result<f64> {
    if !(m > 10.0) || !(r > 0.0) {
        return Err(LabError::InvalidArgument(format!("two_bump_h1_norm(M={m}, r={r})")));
    }
    let n = grid.dimension;
    let mut y0 = vec![0.0; n];
    y0[n - 1] = 2.0 * r;
    let mut x0 = y0.clone();
    x0[n - 1] += m * r;
    if x0[n - 1] + r + m * r > grid.half_width {
        return Err(LabError::InvalidGrid(format!(
            "box half-width {} is below {} needed for M = {m}, r = {r}",
            grid.half_width,
            x0[n - 1] + r + m * r
        )));
    }
    if r < 2.0 * grid.spacing() {
        return Err(LabError::InvalidGrid(format!("bump radius {r} is under two cells")));
    }
    let bx = crate::grid::ball_indicator(grid, &crate::grid::Ball::new(x0, r));
    let by = crate::grid::ball_indicator(grid, &crate::grid::Ball::new(y0, r));
    let f = bx.sub(&by);
    h1_norm(&f, Characterization::Max, Flavor::Neumann, &ScaleGrid::for_grid(&grid, ScaleGrid::DEFAULT_COUNT), &OperatorConfig::default())
}

/// Terms and residual of one factorization level.
#[derive(Clone, Debug)]
pub struct LevelRecord {
    pub terms: Vec<(f64, FactorPair)>,
    pub residual_h1: f64,
}

impl LevelRecord {
    pub fn cost(&self) -> f64 {
        self.terms.iter().map(|(lam, p)| lam.abs() * p.cost()).sum()
    }
}

/// Record of an iterative factorization.
#[derive(Clone, Debug)]
pub struct FactorizationLedger {
    pub epsilon: f64,
    pub l: usize,
    pub initial_h1: f64,
    pub levels: Vec<LevelRecord>,
    pub total_l1_cost: f64,
    /// `Σ_k Σ_j λ_j^k Π_l(h_j^k, g_j^k)`.
    pub synthesized: GridFunction,
    /// `E_K`.
    pub residual: GridFunction,
}

#[derive(Serialize)]
struct TermSummary<'a> {
    lambda: f64,
    x0: &'a [f64],
    y0: &'a [f64],
    r: f64,
    m: usize,
    pair_cost: f64,
}

#[derive(Serialize)]
struct LevelSummary<'a> {
    level: usize,
    residual_h1: f64,
    ratio: f64,
    cost: f64,
    terms: Vec<TermSummary<'a>>,
}

#[derive(Serialize)]
struct LedgerSummary<'a> {
    epsilon: f64,
    l: usize,
    initial_h1: f64,
    total_l1_cost: f64,
    levels: Vec<LevelSummary<'a>>,
}

impl FactorizationLedger {
    /// `E_k / E_{k−1}` per level, with `E_0 = ‖f‖_{H¹}`.
    pub fn ratios(&self) -> Vec<f64> {
        let mut prev = self.initial_h1;
        self.levels
            .iter()
            .map(|lv| {
                let r = lv.residual_h1 / prev;
                prev = lv.residual_h1;
                r
            })
            .collect()
    }

    /// `‖f − Σ λ Π − E_K‖₂`.
    pub fn reconstruction_error(&self, f: &GridFunction) -> f64 {
        norm(&f.sub(&self.synthesized).sub(&self.residual), Norm::L2)
    }

    pub fn to_json(&self) -> Result<String> {
        let ratios = self.ratios();
        let levels = self
            .levels
            .iter()
            .enumerate()
            .map(|(k, lv)| LevelSummary {
                level: k + 1,
                residual_h1: lv.residual_h1,
                ratio: ratios[k],
                cost: lv.cost(),
                terms: lv
                    .terms
                    .iter()
                    .map(|(lam, p)| TermSummary { lambda: *lam, x0: &p.x0, y0: &p.y0, r: p.r, m: p.m, pair_cost: p.cost() })
                    .collect(),
            })
            .collect();
        let s = LedgerSummary {
            epsilon: self.epsilon,
            l: self.l,
            initial_h1: self.initial_h1,
            total_l1_cost: self.total_l1_cost,
            levels,
        };
        Ok(serde_json::to_string_pretty(&s)?)
    }

    /// Writes `<stem>.json` and `<stem>.csv` (`level,residual_h1,ratio,cost`).
    pub fn write(&self, stem: &Path) -> Result<()> {
        write_atomic(&stem.with_extension("json"), self.to_json()?.as_bytes())?;
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["level", "residual_h1", "ratio", "cost"])?;
        for (k, (lv, r)) in self.levels.iter().zip(self.ratios()).enumerate() {
            w.write_record(&[(k + 1).to_string(), lv.residual_h1.to_string(), r.to_string(), lv.cost().to_string()])?;
        }
        let bytes = w.into_inner().map_err(|e| LabError::InvalidArgument(e.to_string()))?;
        write_atomic(&stem.with_extension("csv"), &bytes)
    }
}

/// Iterative factorization: decompose the residual into atoms, factor each,
/// repeat. Stops after `k_max` levels or once the residual H¹ norm is below
/// [`STOP_RESIDUAL`]; two consecutive non-contracting levels abort.
pub fn weak_factorize(
    f: &GridFunction,
    epsilon: f64,
    l: usize,
    k_max: usize,
    choice: HChoice,
    cfg: &OperatorConfig,
) -> Result<FactorizationLedger> {
    let grid = f.grid;
    let scales = ScaleGrid::for_grid(&grid, ScaleGrid::DEFAULT_COUNT);
    let h1 = |e: &GridFunction| h1_norm(e, Characterization::Max, Flavor::Neumann, &scales, cfg);
    let riesz = LocalRiesz::new(grid, l, cfg)?;
    let initial_h1 = h1(f)?;
    let mut ledger = FactorizationLedger {
        epsilon,
        l,
        initial_h1,
        levels: Vec::new(),
        total_l1_cost: 0.0,
        synthesized: GridFunction::zeros(grid),
        residual: f.clone(),
    };
    let mut prev = initial_h1;
    let mut bad = 0;
    for level in 1..=k_max {
        if prev < STOP_RESIDUAL {
            break;
        }
        let atoms = haar_atomic_decomposition(&ledger.residual, None)?;
        let factored = atoms
            .terms
            .par_iter()
            .map(|(lam, a)| factor_with(&riesz, a, epsilon, l, choice, cfg).map(|(p, w)| (*lam, a, p, w)))
            .collect::<Result<Vec<_>>>()?;
        let mut next = GridFunction::zeros(grid);
        let mut terms = Vec::with_capacity(factored.len());
        for (lam, a, pair, w) in factored {
            next.axpy(lam, &w);
            for (&i, &v) in a.support.iter().zip(&a.values) {
                ledger.synthesized.values[i] += lam * v;
            }
            ledger.synthesized.axpy(-lam, &w);
            terms.push((lam, pair));
        }
        let residual_h1 = h1(&next)?;
        let record = LevelRecord { terms, residual_h1 };
        ledger.total_l1_cost += record.cost();
        ledger.levels.push(record);
        ledger.residual = next;
        let ratio = residual_h1 / prev;
        log::debug!("level {level}: residual {residual_h1:e}, ratio {ratio:.4}");
        bad = if ratio >= 1.0 { bad + 1 } else { 0 };
        if bad >= 2 {
            return Err(LabError::NonContracting { level, ratio, ledger: Box::new(ledger) });
        }
        prev = residual_h1;
    }
    Ok(ledger)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atoms::haar_atomic_decomposition;
    use crate::grid::{integrate_half, restrict, Half};

    fn unit_atom(g: Grid, x0: f64, r: f64) -> WeakAtom {
        let f = GridFunction::from_fn(g, |x| {
            let u = x[0] - x0;
            if u.abs() < r {
                u.signum() / (2.0 * r)
            } else {
                0.0
            }
        });
        let d = haar_atomic_decomposition(&f, None).unwrap();
        assert_eq!(d.terms.len(), 1);
        d.terms[0].1.clone()
    }

    #[test]
    fn m_selection() {
        assert_eq!(select_m(0.5).unwrap(), 16);
        assert_eq!(select_m(0.25).unwrap(), 32);
        assert_eq!(select_m(0.1).unwrap(), 64);
        assert_eq!(select_m(0.01).unwrap(), 1024);
        assert!(select_m(0.0).is_err());
        assert!(select_m(-1.0).is_err());
    }

    #[test]
    fn factor_single_atom() {
        let g = Grid::new(1, 16.0, 2048).unwrap();
        let a = unit_atom(g, 12.125, 0.125);
        let cfg = OperatorConfig::default();
        for choice in [HChoice::Balanced, HChoice::Verbatim] {
            let (p, w) = approx_factor_atom(&a, 0.1, 1, choice, &cfg).unwrap();
            assert_eq!(p.m, 64);
            assert!((p.y0[0] - (12.125 - 8.0)).abs() < 1e-12);
            assert!(integrate(&w).abs() < 1e-8);
            assert!(p.envelope_constant(&w).is_finite());
            assert!(p.riesz_mass.abs() > 0.0);
            // the residual matches the full-grid bilinear form
            let full = crate::operators::pi_form(&p.h, &p.g, 1, &cfg).unwrap();
            let w2 = a.dense().sub(&full);
            assert!(norm(&w.sub(&w2), Norm::Linf) < 1e-9 * norm(&w, Norm::Linf).max(1.0));
            if choice == HChoice::Balanced {
                let ix = cube_indicator(g, &p.x0, p.half_side);
                assert!(integrate(&w.mul(&ix)).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn lower_half_atom_mirrors() {
        let g = Grid::new(1, 16.0, 2048).unwrap();
        let a = unit_atom(g, -12.125, 0.125);
        let (p, w) = approx_factor_atom(&a, 0.1, 1, HChoice::Balanced, &OperatorConfig::default()).unwrap();
        assert!((p.y0[0] + 4.125).abs() < 1e-12);
        assert!(integrate(&w).abs() < 1e-8);
    }

    #[test]
    fn placement_flips_then_fails() {
        let g = Grid::new(1, 16.0, 2048).unwrap();
        let a = unit_atom(g, 2.125, 0.125);
        let (p, _) = approx_factor_atom(&a, 0.1, 1, HChoice::Balanced, &OperatorConfig::default()).unwrap();
        assert!((p.y0[0] - 10.125).abs() < 1e-12);
        let a = unit_atom(g, 8.5, 0.5);
        match approx_factor_atom(&a, 0.1, 1, HChoice::Balanced, &OperatorConfig::default()) {
            Err(LabError::Placement(_)) => {}
            other => panic!("expected placement error, got {other:?}"),
        }
    }

    #[test]
    fn two_dimensional_factor() {
        let g = Grid::new(2, 8.0, 64).unwrap();
        let f = GridFunction::from_fn(g, |x| {
            let (u, v) = (x[0] - 6.25, x[1] - 6.25);
            if u.abs() < 0.25 && v.abs() < 0.25 {
                u.signum()
            } else {
                0.0
            }
        });
        let d = haar_atomic_decomposition(&f, None).unwrap();
        assert_eq!(d.terms.len(), 1);
        let cfg = OperatorConfig::default();
        for l in 1..=2 {
            let (p, w) = approx_factor_atom(&d.terms[0].1, 0.5, l, HChoice::Balanced, &cfg).unwrap();
            assert_eq!(p.m, 16);
            assert!(integrate(&w).abs() < 1e-8);
            assert!(p.envelope_constant(&w).is_finite());
            assert!(p.y0.iter().all(|c| c.abs() + p.half_side <= 8.0));
        }
    }

    #[test]
    fn riesz_mass_oracle() {
        // analytic 1-D integral of −(1/π)(1/(x−y) + 1/(x+y)) over [y₀−r, y₀+r]
        for &m in &[16.0, 64.0, 256.0] {
            let r: f64 = 1.0;
            let x0 = 10.0 * m * r;
            let y0 = x0 - m * r;
            let exact: f64 = ((x0 - y0 + r) / (x0 - y0 - r) as f64).ln() + ((x0 + y0 + r) / (x0 + y0 - r)).ln();
            let exact = exact / std::f64::consts::PI;
            let v = riesz_mass(m, r, 1, 1).unwrap();
            assert!((v - exact).abs() < 1e-8 * exact, "{v} {exact}");
        }
        let v = riesz_mass(256.0, 1.0, 1, 1).unwrap();
        assert!((v * std::f64::consts::PI * 256.0 / 2.0 - 1.0).abs() < 0.1);
        let fit = riesz_mass_scaling(&[16.0, 64.0, 256.0], 1.0, 1, 1).unwrap();
        assert!((fit.slope + 1.0).abs() < 0.15);
        let fit = riesz_mass_scaling(&[16.0, 64.0, 256.0], 0.5, 2, 2).unwrap();
        assert!((fit.slope + 2.0).abs() < 0.15, "{}", fit.slope);
        assert!(fit.values.iter().all(|v| *v > 0.0));
        assert!(riesz_mass(5.0, 1.0, 1, 1).is_err());
    }

    #[test]
    fn slope_fit() {
        let xs = [1.0, 2.0, 4.0, 8.0];
        let ys: Vec<f64> = xs.iter().map(|x: &f64| 3.0 * x.powf(-1.5)).collect();
        assert!((loglog_slope(&xs, &ys) + 1.5).abs() < 1e-12);
    }

    #[test]
    fn two_bump_box_check() {
        let g = Grid::new(1, 16.0, 256).unwrap();
        assert!(two_bump_h1_norm(16.0, 1.0, g).is_err());
        let g = Grid::new(1, 64.0, 1024).unwrap();
        let a = two_bump_h1_norm(16.0, 1.0, g).unwrap();
        assert!(a > 0.0);
    }

    #[test]
    fn weak_factorize_zero() {
        let g = Grid::new(1, 16.0, 512).unwrap();
        let z = GridFunction::zeros(g);
        let led = weak_factorize(&z, 0.1, 1, 6, HChoice::Balanced, &OperatorConfig::default()).unwrap();
        assert!(led.levels.is_empty());
        assert_eq!(led.total_l1_cost, 0.0);
    }

    #[test]
    fn weak_factorize_single_atom() {
        let g = Grid::new(1, 16.0, 2048).unwrap();
        let a = unit_atom(g, 12.125, 0.125).dense();
        let led = weak_factorize(&a, 0.1, 1, 4, HChoice::Balanced, &OperatorConfig::default()).unwrap();
        assert!(!led.levels.is_empty());
        for r in led.ratios() {
            assert!(r < 1.0, "{:?}", led.ratios());
        }
        assert!(led.reconstruction_error(&a) < 1e-7);
        assert!(led.total_l1_cost > 0.0);
        let dir = tempfile::tempdir().unwrap();
        led.write(&dir.path().join("ledger")).unwrap();
        let csv = std::fs::read_to_string(dir.path().join("ledger.csv")).unwrap();
        assert!(csv.starts_with("level,residual_h1,ratio,cost"));
        assert_eq!(csv.lines().count(), led.levels.len() + 1);
    }

    #[test]
    fn mean_zero_halves_required() {
        let g = Grid::new(1, 16.0, 512).unwrap();
        let f = restrict(&GridFunction::constant(g, 1.0), Half::Plus);
        assert!(integrate_half(&f, Half::Plus) > 0.0);
        assert!(weak_factorize(&f, 0.1, 1, 2, HChoice::Balanced, &OperatorConfig::default()).is_err());
    }
}
