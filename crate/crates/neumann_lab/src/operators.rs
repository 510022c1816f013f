//! Grid operators: heat semigroup, Littlewood–Paley `Q_{t²}`, Neumann Riesz
//! transforms and adjoints, commutators, the bilinear form `Π_l` and the
//! synthesis map `b₀ + Σ R*_{N,j} b_j`.
//!
//! All kernels are translation invariant in the index offset, so each
//! operator is a pair of offset tables: one for the direct term `y` and one
//! for the mirror term `ỹ`. Since `x̃` of sample `k` is sample `N − 1 − k`
//! along the last axis, the mirror term is a direct sum against the
//! reversed function. Heat weights are exact cell integrals of the Gaussian,
//! so mass is conserved up to box truncation and `t → 0` gives the identity.

use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::erf::{erf, erfc};

use crate::error::{LabError, Result};
use crate::grid::{write_atomic, Grid, GridFunction};
use crate::kernels::{riesz_kernel_components, Flavor};
use crate::simd::dot;

/// Principal-value policy for the Riesz quadrature.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OperatorConfig {
    /// Sources closer than this many grid spacings to the target are dropped.
    pub pv_exclusion_radius: f64,
}

impl Default for OperatorConfig {
    fn default() -> Self {
        OperatorConfig { pv_exclusion_radius: 1.0 }
    }
}

impl OperatorConfig {
    pub fn new(pv_exclusion_radius: f64) -> Result<OperatorConfig> {
        if !(pv_exclusion_radius >= 1.0) {
            return Err(LabError::InvalidArgument(format!(
                "p.v. exclusion radius {pv_exclusion_radius} is below one cell"
            )));
        }
        Ok(OperatorConfig { pv_exclusion_radius })
    }
}

/// One-dimensional offset table, `K(d)` for `|d| ≤ reach`, stored reversed so
/// that sums over consecutive sources read it contiguously.
#[derive(Clone, Debug)]
struct Table {
    data: Vec<f64>,
    reach: usize,
}

impl Table {
    fn from_fn(reach: usize, k: impl Fn(i64) -> f64) -> Table {
        let r = reach as i64;
        Table { data: (0..=2 * r).map(|m| k(r - m)).collect(), reach }
    }

    /// Even table built from `w(|d|)` with trailing negligible entries dropped.
    fn even_trimmed(n: usize, w: impl Fn(usize) -> f64) -> Table {
        let vals: Vec<f64> = (0..n).map(&w).collect();
        let reach = vals.iter().rposition(|v| v.abs() > 1e-20).unwrap_or(0);
        Table::from_fn(reach, |d| vals[d.unsigned_abs() as usize])
    }

    /// `Σ_{j=lo..=hi} K(i − j) f[j]`.
    fn sum(&self, f: &[f64], i: usize, lo: usize, hi: usize) -> f64 {
        let r = self.reach;
        let jlo = lo.max(i.saturating_sub(r));
        let jhi = hi.min(i + r);
        if jlo > jhi {
            return 0.0;
        }
        let k0 = r + jlo - i;
        dot(&self.data[k0..k0 + (jhi - jlo + 1)], &f[jlo..=jhi])
    }
}

/// Applies a 1-D operator with direct table `d` and, for Neumann, mirror table `e`.
fn apply_line(d: &Table, e: Option<&Table>, f: &[f64]) -> Vec<f64> {
    let n = f.len();
    let half = n / 2;
    match e {
        None => (0..n).into_par_iter().map(|i| d.sum(f, i, 0, n - 1)).collect(),
        Some(e) => {
            let rev: Vec<f64> = f.iter().rev().copied().collect();
            (0..n)
                .into_par_iter()
                .map(|i| {
                    let (same, other) = if i >= half { ((half, n - 1), (0, half - 1)) } else { ((0, half - 1), (half, n - 1)) };
                    d.sum(f, i, same.0, same.1) + e.sum(&rev, i, other.0, other.1)
                })
                .collect()
        }
    }
}

fn transpose(v: &[f64], n: usize) -> Vec<f64> {
    let mut out = vec![0.0; v.len()];
    for i in 0..n {
        for j in 0..n {
            out[j * n + i] = v[i * n + j];
        }
    }
    out
}

/// Applies `tang ⊗ normal` to a 2-D array; the normal pass honours the flavor.
fn apply_separable(v: &[f64], n: usize, tang: &Table, normal: &Table, flavor: Flavor) -> Vec<f64> {
    let mirror = match flavor {
        Flavor::Neumann => Some(normal),
        Flavor::Classical => None,
    };
    let rows: Vec<f64> = v.chunks(n).flat_map(|row| apply_line(normal, mirror, row)).collect();
    let t = transpose(&rows, n);
    let cols: Vec<f64> = t.chunks(n).flat_map(|row| apply_line(tang, None, row)).collect();
    transpose(&cols, n)
}

/// Cell-integrated Gaussian `∫_{(d−½)h}^{(d+½)h} (4πs)^{−1/2} e^{−z²/4s} dz`.
fn heat_weight(d: usize, h: f64, s: f64) -> f64 {
    let q = 2.0 * s.sqrt();
    if d == 0 {
        erf(0.5 * h / q)
    } else {
        let a = (d as f64 - 0.5) * h / q;
        let b = (d as f64 + 0.5) * h / q;
        0.5 * (erfc(a) - erfc(b))
    }
}

/// `−s ∂_s` of [`heat_weight`].
fn q_weight(d: usize, h: f64, s: f64) -> f64 {
    let psi = |c: f64| c / (2.0 * (std::f64::consts::PI * s).sqrt()) * (-c * c / (4.0 * s)).exp();
    let a = (d as f64 - 0.5) * h;
    let b = (d as f64 + 0.5) * h;
    0.5 * (psi(b) - psi(a))
}

fn check_time(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(LabError::NonPositiveTime(t))
    }
}

/// `e^{−tL} f` with `L = Δ` or `Δ_N`; `t` is heat time.
pub fn apply_semigroup(f: &GridFunction, t: f64, flavor: Flavor) -> Result<GridFunction> {
    check_time(t)?;
    let g = f.grid;
    let n = g.points_per_axis;
    let h = g.spacing();
    let w = Table::even_trimmed(n, |d| heat_weight(d, h, t));
    let values = match g.dimension {
        1 => apply_line(&w, (flavor == Flavor::Neumann).then_some(&w), &f.values),
        _ => apply_separable(&f.values, n, &w, &w, flavor),
    };
    Ok(GridFunction { grid: g, values })
}

/// `Q_{t²} f = t² L e^{−t²L} f = −s ∂_s e^{−sL} f |_{s = t²}`.
pub fn apply_q(f: &GridFunction, t: f64, flavor: Flavor) -> Result<GridFunction> {
    check_time(t)?;
    let s = t * t;
    let g = f.grid;
    let n = g.points_per_axis;
    let h = g.spacing();
    let q = Table::even_trimmed(n, |d| q_weight(d, h, s));
    let values = match g.dimension {
        1 => apply_line(&q, (flavor == Flavor::Neumann).then_some(&q), &f.values),
        _ => {
            let w = Table::even_trimmed(n, |d| heat_weight(d, h, s));
            let a = apply_separable(&f.values, n, &q, &w, flavor);
            let b = apply_separable(&f.values, n, &w, &q, flavor);
            a.iter().zip(&b).map(|(x, y)| x + y).collect()
        }
    };
    Ok(GridFunction { grid: g, values })
}

/// Riesz kernel times `hⁿ` at an index displacement, with the p.v. cut.
fn riesz_cell(grid: &Grid, l: usize, disp: &[i64], cfg: &OperatorConfig) -> f64 {
    let r2: i64 = disp.iter().map(|d| d * d).sum();
    if (r2 as f64) < cfg.pv_exclusion_radius * cfg.pv_exclusion_radius {
        return 0.0;
    }
    let h = grid.spacing();
    let x: Vec<f64> = disp.iter().map(|&d| d as f64 * h).collect();
    let zero = vec![0.0; disp.len()];
    riesz_kernel_components(l, &x, &zero).expect("nonzero displacement").0 * grid.cell_volume()
}

/// Direct and mirror tables of `R_{N,l}` (or its transpose) on a grid.
struct RieszTables {
    n: usize,
    dim: usize,
    /// 1-D: one row. 2-D: row `r − d1` holds `K(d1, ·)` reversed.
    direct: Vec<Table>,
    mirror: Vec<Table>,
}

impl RieszTables {
    fn new(grid: &Grid, l: usize, adjoint: bool, cfg: &OperatorConfig) -> Result<RieszTables> {
        if !(1..=grid.dimension).contains(&l) {
            return Err(LabError::InvalidArgument(format!("axis {l} not in 1..={}", grid.dimension)));
        }
        let n = grid.points_per_axis;
        let r = (n - 1) as i64;
        // Transposition maps the direct displacement d to −d and the mirror
        // displacement (d', d_n) to (−d', d_n).
        let sd = if adjoint { -1 } else { 1 };
        let (direct, mirror) = match grid.dimension {
            1 => (
                vec![Table::from_fn(n - 1, |d| riesz_cell(grid, l, &[sd * d], cfg))],
                vec![Table::from_fn(n - 1, |d| riesz_cell(grid, l, &[d], cfg))],
            ),
            _ => {
                let rows = |mirror: bool| -> Vec<Table> {
                    (0..=2 * r)
                        .map(|m| {
                            let d1 = r - m;
                            Table::from_fn(n - 1, |d2| {
                                let disp = if mirror { [sd * d1, d2] } else { [sd * d1, sd * d2] };
                                riesz_cell(grid, l, &disp, cfg)
                            })
                        })
                        .collect()
                };
                (rows(false), rows(true))
            }
        };
        Ok(RieszTables { n, dim: grid.dimension, direct, mirror })
    }

    fn apply(&self, f: &[f64], neumann: bool) -> Vec<f64> {
        let n = self.n;
        if self.dim == 1 {
            let mirror = neumann.then_some(&self.mirror[0]);
            return apply_line(&self.direct[0], mirror, f);
        }
        let half = n / 2;
        let r = n - 1;
        let rev: Vec<f64> = f.chunks(n).flat_map(|row| row.iter().rev().copied()).collect();
        (0..n * n)
            .into_par_iter()
            .map(|idx| {
                let (i1, i2) = (idx / n, idx % n);
                let mut acc = 0.0;
                for j1 in 0..n {
                    let row = r + j1 - i1; // = r − (i1 − j1)
                    let fr = &f[j1 * n..(j1 + 1) * n];
                    if neumann {
                        let rr = &rev[j1 * n..(j1 + 1) * n];
                        let (same, other) =
                            if i2 >= half { ((half, n - 1), (0, half - 1)) } else { ((0, half - 1), (half, n - 1)) };
                        acc += self.direct[row].sum(fr, i2, same.0, same.1);
                        acc += self.mirror[row].sum(rr, i2, other.0, other.1);
                    } else {
                        acc += self.direct[row].sum(fr, i2, 0, n - 1);
                    }
                }
                acc
            })
            .collect()
    }

    /// `hⁿ R_{N,l}(x_i, x_j)` (or the transpose) for flat indices.
    fn entry(&self, grid: &Grid, i: usize, j: usize) -> f64 {
        if grid.half_of(i) != grid.half_of(j) {
            return 0.0;
        }
        let n = self.n;
        let r = n - 1;
        let (i1, i2, j1, j2) = if self.dim == 1 { (0, i, 0, j) } else { (i / n, i % n, j / n, j % n) };
        let row = if self.dim == 1 { 0 } else { r + j1 - i1 };
        let d = &self.direct[row];
        let m = &self.mirror[row];
        let jm = n - 1 - j2;
        d.data[r + j2 - i2] + m.data[r + jm - i2]
    }
}

/// `R_{N,l} f`, or `R*_{N,l} f` when `adjoint`, by p.v. quadrature.
pub fn apply_riesz(f: &GridFunction, l: usize, adjoint: bool, cfg: &OperatorConfig) -> Result<GridFunction> {
    let tables = RieszTables::new(&f.grid, l, adjoint, cfg)?;
    Ok(GridFunction { grid: f.grid, values: tables.apply(&f.values, true) })
}

/// Classical `R_l f` (or `R*_l f`) on the whole grid, no hyperplane.
pub fn apply_classical_riesz(f: &GridFunction, l: usize, adjoint: bool, cfg: &OperatorConfig) -> Result<GridFunction> {
    let tables = RieszTables::new(&f.grid, l, adjoint, cfg)?;
    Ok(GridFunction { grid: f.grid, values: tables.apply(&f.values, false) })
}

/// `R_{N,l}` and its adjoint evaluated at chosen samples, with tables built
/// once and reused. Cost is `targets × nonzero sources`.
pub struct LocalRiesz {
    grid: Grid,
    forward: RieszTables,
    adjoint: RieszTables,
}

impl LocalRiesz {
    pub fn new(grid: Grid, l: usize, cfg: &OperatorConfig) -> Result<LocalRiesz> {
        Ok(LocalRiesz {
            grid,
            forward: RieszTables::new(&grid, l, false, cfg)?,
            adjoint: RieszTables::new(&grid, l, true, cfg)?,
        })
    }

    pub fn eval(&self, f: &GridFunction, adjoint: bool, targets: &[usize]) -> Vec<f64> {
        let t = if adjoint { &self.adjoint } else { &self.forward };
        let sources: Vec<usize> = (0..f.values.len()).filter(|&j| f.values[j] != 0.0).collect();
        targets
            .par_iter()
            .map(|&i| sources.iter().map(|&j| t.entry(&self.grid, i, j) * f.values[j]).sum())
            .collect()
    }

    /// `Π_l(h, g)` computed only on the supports of `h` and `g`.
    pub fn pi_form(&self, h: &GridFunction, g: &GridFunction) -> Result<GridFunction> {
        same_grid(h, g)?;
        let mut out = GridFunction::zeros(h.grid);
        let sh: Vec<usize> = (0..h.values.len()).filter(|&i| h.values[i] != 0.0).collect();
        let sg: Vec<usize> = (0..g.values.len()).filter(|&i| g.values[i] != 0.0).collect();
        for (&i, v) in sh.iter().zip(self.eval(g, false, &sh)) {
            out.values[i] += h.values[i] * v;
        }
        for (&i, v) in sg.iter().zip(self.eval(h, true, &sg)) {
            out.values[i] -= g.values[i] * v;
        }
        Ok(out)
    }
}

/// `R_{N,l} f` (or its adjoint) at selected flat indices only; sums over the
/// nonzero samples of `f`. Used where supports are small.
pub fn riesz_at_indices(
    f: &GridFunction,
    l: usize,
    adjoint: bool,
    targets: &[usize],
    cfg: &OperatorConfig,
) -> Result<Vec<f64>> {
    Ok(LocalRiesz::new(f.grid, l, cfg)?.eval(f, adjoint, targets))
}

/// `R_{N,l} f (x)` at an arbitrary point, excluding sources within the p.v. radius
/// of `x` (direct term) or of `x̃` (mirror term).
pub fn riesz_at_point(f: &GridFunction, l: usize, x: &[f64], cfg: &OperatorConfig) -> Result<f64> {
    let g = f.grid;
    let rho2 = (cfg.pv_exclusion_radius * g.spacing()).powi(2);
    let xr = crate::grid::reflect_point(x);
    let xn = x[x.len() - 1];
    let mut acc = 0.0;
    for (j, &v) in f.values.iter().enumerate() {
        if v == 0.0 {
            continue;
        }
        let y = g.point(j);
        if crate::kernels::heaviside(xn * y[y.len() - 1]) == 0.0 {
            continue;
        }
        let yr = crate::grid::reflect_point(&y);
        if crate::grid::dist2(x, &y) >= rho2 {
            acc += riesz_kernel_components(l, x, &y)?.0 * v;
        }
        if crate::grid::dist2(&xr, &y) >= rho2 {
            acc += riesz_kernel_components(l, x, &yr)?.0 * v;
        }
    }
    Ok(acc * g.cell_volume())
}

/// Classical `R_l f (x)` at an arbitrary point.
pub fn classical_riesz_at_point(f: &GridFunction, l: usize, x: &[f64], cfg: &OperatorConfig) -> Result<f64> {
    let g = f.grid;
    let rho2 = (cfg.pv_exclusion_radius * g.spacing()).powi(2);
    let mut acc = 0.0;
    for (j, &v) in f.values.iter().enumerate() {
        let y = g.point(j);
        if v != 0.0 && crate::grid::dist2(x, &y) >= rho2 {
            acc += riesz_kernel_components(l, x, &y)?.0 * v;
        }
    }
    Ok(acc * g.cell_volume())
}

fn same_grid(a: &GridFunction, b: &GridFunction) -> Result<()> {
    if a.grid == b.grid {
        Ok(())
    } else {
        Err(LabError::InvalidArgument("functions live on different grids".into()))
    }
}

/// `[b, R_{N,l}] f = b·R_{N,l} f − R_{N,l}(b f)`.
pub fn commutator(b: &GridFunction, f: &GridFunction, l: usize, cfg: &OperatorConfig) -> Result<GridFunction> {
    same_grid(b, f)?;
    let rf = apply_riesz(f, l, false, cfg)?;
    let rbf = apply_riesz(&b.mul(f), l, false, cfg)?;
    Ok(b.mul(&rf).sub(&rbf))
}

/// `Π_l(h, g) = h·R_{N,l} g − g·R*_{N,l} h`.
pub fn pi_form(h: &GridFunction, g: &GridFunction, l: usize, cfg: &OperatorConfig) -> Result<GridFunction> {
    same_grid(h, g)?;
    let rg = apply_riesz(g, l, false, cfg)?;
    let rh = apply_riesz(h, l, true, cfg)?;
    Ok(h.mul(&rg).sub(&g.mul(&rh)))
}

/// `b₀ + Σ_{j=1..n} R*_{N,j} b_j`.
pub fn fs_synthesize(bs: &[GridFunction], cfg: &OperatorConfig) -> Result<GridFunction> {
    let b0 = bs.first().ok_or_else(|| LabError::InvalidArgument("empty tuple".into()))?;
    let n = b0.grid.dimension;
    if bs.len() != n + 1 {
        return Err(LabError::InvalidArgument(format!("expected {} functions, got {}", n + 1, bs.len())));
    }
    let mut out = b0.clone();
    for (j, b) in bs.iter().enumerate().skip(1) {
        same_grid(b0, b)?;
        out = out.add(&apply_riesz(b, j, true, cfg)?);
    }
    Ok(out)
}

/// Dense matrix of `R_{N,l}` on a 1-D grid: `(R f)_i = Σ_j m[i][j] f_j`.
#[derive(Clone, Debug)]
pub struct RieszMatrix {
    pub grid: Grid,
    pub l: usize,
    pub entries: Vec<Vec<f64>>,
}

impl RieszMatrix {
    pub fn build(grid: Grid, l: usize, cfg: &OperatorConfig) -> Result<RieszMatrix> {
        if grid.dimension != 1 || grid.points_per_axis > 4096 {
            return Err(LabError::InvalidArgument("explicit matrices are for small 1-D grids".into()));
        }
        let t = RieszTables::new(&grid, l, false, cfg)?;
        let n = grid.len();
        let entries = (0..n).map(|i| (0..n).map(|j| t.entry(&grid, i, j)).collect()).collect();
        Ok(RieszMatrix { grid, l, entries })
    }

    pub fn apply(&self, f: &[f64]) -> Vec<f64> {
        self.entries.iter().map(|row| row.iter().zip(f).map(|(a, b)| a * b).sum()).collect()
    }

    pub fn apply_transpose(&self, f: &[f64]) -> Vec<f64> {
        let n = f.len();
        (0..n).map(|j| (0..n).map(|i| self.entries[i][j] * f[i]).sum()).collect()
    }

    /// Dumps the matrix as CSV (`row,col,value`, nonzero entries).
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut buf = Vec::new();
        writeln!(buf, "row,col,value")?;
        for (i, row) in self.entries.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                if *v != 0.0 {
                    writeln!(buf, "{i},{j},{v:.17e}")?;
                }
            }
        }
        write_atomic(path, &buf)
    }
}
