//! Maximal functions, area functions, and the H¹ and BMO norm estimators.
//!
//! Sups over `t > 0` run over a [`ScaleGrid`] of heat times `s = t²`,
//! log-spaced in `[h²/4, (2L)²]`. Cones `{|x − y| < t}` and ball radii use
//! `t = √s`. Discrete sups can only under-estimate the continuum ones.

use std::collections::VecDeque;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::grid::{even_extension, norm, Grid, GridFunction, Half, Norm};
use crate::kernels::Flavor;
use crate::operators::{apply_classical_riesz, apply_q, apply_riesz, apply_semigroup, OperatorConfig};

/// Log-spaced heat times `s_k`, `k = 0..count`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScaleGrid {
    pub s_min: f64,
    pub s_max: f64,
    pub count: usize,
}

impl ScaleGrid {
    pub const DEFAULT_COUNT: usize = 48;

    pub fn new(grid: &Grid, s_min: f64, s_max: f64, count: usize) -> Result<ScaleGrid> {
        let h = grid.spacing();
        let lo = h * h / 4.0;
        let hi = (2.0 * grid.half_width).powi(2);
        if s_min < lo * (1.0 - 1e-12) || s_max > hi * (1.0 + 1e-12) || !(s_min < s_max) || count < 2 {
            return Err(LabError::InvalidArgument(format!(
                "scale grid [{s_min}, {s_max}] x {count} outside [{lo}, {hi}]"
            )));
        }
        Ok(ScaleGrid { s_min, s_max, count })
    }

    /// Full range `[h²/4, (2L)²]` with `count` samples.
    pub fn for_grid(grid: &Grid, count: usize) -> ScaleGrid {
        let h = grid.spacing();
        ScaleGrid { s_min: h * h / 4.0, s_max: (2.0 * grid.half_width).powi(2), count: count.max(2) }
    }

    pub fn heat_times(&self) -> Vec<f64> {
        let (a, b) = (self.s_min.ln(), self.s_max.ln());
        (0..self.count)
            .map(|k| (a + (b - a) * k as f64 / (self.count - 1) as f64).exp())
            .collect()
    }

    /// Trapezoid weights for `∫ g(t) dt/t` on the grid (`dt/t = d(ln s)/2`).
    pub fn log_weights(&self) -> Vec<f64> {
        let du = (self.s_max.ln() - self.s_min.ln()) / (self.count - 1) as f64;
        (0..self.count)
            .map(|k| if k == 0 || k == self.count - 1 { 0.25 * du } else { 0.5 * du })
            .collect()
    }
}

/// `e^{−sL} f` for every heat time of a scale grid.
pub fn semigroup_fields(f: &GridFunction, flavor: Flavor, scales: &ScaleGrid) -> Result<Vec<GridFunction>> {
    scales.heat_times().iter().map(|&s| apply_semigroup(f, s, flavor)).collect()
}

/// `f⁺(x) = max_s |e^{−sL} f(x)|`.
pub fn radial_maximal(f: &GridFunction, flavor: Flavor, scales: &ScaleGrid) -> Result<GridFunction> {
    let mut out = GridFunction::zeros(f.grid);
    for s in scales.heat_times() {
        let u = apply_semigroup(f, s, flavor)?;
        for (o, v) in out.values.iter_mut().zip(&u.values) {
            *o = o.max(v.abs());
        }
    }
    Ok(out)
}

/// Max of `v` over `[i − m, i + m]`, monotone deque.
fn sliding_max(v: &[f64], m: usize) -> Vec<f64> {
    let n = v.len();
    let mut out = vec![0.0; n];
    let mut dq: VecDeque<usize> = VecDeque::new();
    let mut next = 0;
    for i in 0..n {
        let hi = (i + m).min(n - 1);
        while next <= hi {
            while dq.back().map_or(false, |&b| v[b] <= v[next]) {
                dq.pop_back();
            }
            dq.push_back(next);
            next += 1;
        }
        while dq.front().map_or(false, |&f| f + m < i) {
            dq.pop_front();
        }
        out[i] = v[*dq.front().expect("window is non-empty")];
    }
    out
}

/// Largest integer offset `d ≥ 0` with `d·h < t`, or `None` when even `d = 0` fails.
fn cone_reach(t: f64, h: f64) -> usize {
    let r = t / h;
    let d = r.ceil() as usize;
    d.saturating_sub(1)
}

/// `f*(x) = max over (y, s) with |x − y| < √s of |e^{−sL} f(y)|`.
pub fn nontangential_maximal(f: &GridFunction, flavor: Flavor, scales: &ScaleGrid) -> Result<GridFunction> {
    let g = f.grid;
    let n = g.points_per_axis;
    let h = g.spacing();
    let mut out = GridFunction::zeros(g);
    for s in scales.heat_times() {
        let u = apply_semigroup(f, s, flavor)?.map(f64::abs);
        let t = s.sqrt();
        let m = cone_reach(t, h);
        let cone = match g.dimension {
            1 => sliding_max(&u.values, m),
            _ => disc_max(&u.values, n, t, h),
        };
        for (o, v) in out.values.iter_mut().zip(&cone) {
            *o = o.max(*v);
        }
    }
    Ok(out)
}

/// Row half-widths of the open disc `|d| < t/h` in cell units, indexed by `|d1|`.
fn disc_rows(t: f64, h: f64) -> Vec<usize> {
    let r = t / h;
    let mut rows = Vec::new();
    let mut d1 = 0usize;
    while (d1 as f64) < r {
        let rem = r * r - (d1 * d1) as f64;
        // largest d2 with d1² + d2² < r²
        let mut d2 = rem.sqrt().floor() as usize;
        while (d2 * d2) as f64 >= rem && d2 > 0 {
            d2 -= 1;
        }
        if (d2 * d2) as f64 >= rem {
            break;
        }
        rows.push(d2);
        d1 += 1;
    }
    rows
}

fn disc_max(u: &[f64], n: usize, t: f64, h: f64) -> Vec<f64> {
    let rows = disc_rows(t, h);
    let mut widths: Vec<usize> = rows.clone();
    widths.sort_unstable();
    widths.dedup();
    let slid: Vec<(usize, Vec<f64>)> = widths
        .iter()
        .map(|&m| (m, u.chunks(n).flat_map(|row| sliding_max(row, m)).collect()))
        .collect();
    let lookup = |m: usize| &slid.iter().find(|(w, _)| *w == m).expect("width present").1;
    (0..n * n)
        .into_par_iter()
        .map(|idx| {
            let (i1, i2) = (idx / n, idx % n);
            let mut best = 0.0f64;
            for (d1, &m) in rows.iter().enumerate() {
                let arr = lookup(m);
                for j1 in [i1 as i64 - d1 as i64, i1 as i64 + d1 as i64] {
                    if j1 >= 0 && (j1 as usize) < n {
                        best = best.max(arr[j1 as usize * n + i2]);
                    }
                    if d1 == 0 {
                        break;
                    }
                }
            }
            best
        })
        .collect()
}

/// Sum of `v` over the open disc (or interval) `|x − y| < t` around every sample, times `hⁿ`.
/// Windows are summed directly; prefix differences would lose relative accuracy
/// where the window holds a tiny fraction of the total.
fn cone_sums(v: &[f64], grid: &Grid, t: f64) -> Vec<f64> {
    let n = grid.points_per_axis;
    let h = grid.spacing();
    let w = grid.cell_volume();
    let seg = |row: &[f64], i: usize, m: usize| sum_slice(&row[i.saturating_sub(m)..(i + m + 1).min(n)]);
    match grid.dimension {
        1 => {
            let m = cone_reach(t, h);
            (0..n).into_par_iter().map(|i| seg(v, i, m) * w).collect()
        }
        _ => {
            let rows = disc_rows(t, h);
            (0..n * n)
                .into_par_iter()
                .map(|idx| {
                    let (i1, i2) = (idx / n, idx % n);
                    let mut acc = 0.0;
                    for (d1, &m) in rows.iter().enumerate() {
                        if i1 >= d1 {
                            acc += seg(&v[(i1 - d1) * n..(i1 - d1 + 1) * n], i2, m);
                        }
                        if d1 > 0 && i1 + d1 < n {
                            acc += seg(&v[(i1 + d1) * n..(i1 + d1 + 1) * n], i2, m);
                        }
                    }
                    acc * w
                })
                .collect()
        }
    }
}

fn sum_slice(v: &[f64]) -> f64 {
    let mut acc = [0.0f64; 8];
    let chunks = v.chunks_exact(8);
    let rest: f64 = chunks.remainder().iter().sum();
    for c in chunks {
        for k in 0..8 {
            acc[k] += c[k];
        }
    }
    ((acc[0] + acc[4]) + (acc[1] + acc[5])) + ((acc[2] + acc[6]) + (acc[3] + acc[7])) + rest
}

/// `S(f)(x) = (∫∫_{|y−x|<t} |Q_{t²} f(y)|² dy dt/t^{n+1})^{1/2}`.
pub fn area_function(f: &GridFunction, flavor: Flavor, scales: &ScaleGrid) -> Result<GridFunction> {
    let g = f.grid;
    let mut acc = vec![0.0; g.len()];
    for (s, wt) in scales.heat_times().into_iter().zip(scales.log_weights()) {
        let t = s.sqrt();
        let q = apply_q(f, t, flavor)?;
        let sq: Vec<f64> = q.values.iter().map(|v| v * v).collect();
        let c = cone_sums(&sq, &g, t);
        let k = wt / t.powi(g.dimension as i32);
        for (a, v) in acc.iter_mut().zip(&c) {
            *a += k * v;
        }
    }
    Ok(GridFunction { grid: g, values: acc.into_iter().map(f64::sqrt).collect() })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Characterization {
    Area,
    Max,
    Nontangential,
    Riesz,
}

impl Characterization {
    pub fn all() -> [Characterization; 4] {
        [Characterization::Area, Characterization::Max, Characterization::Nontangential, Characterization::Riesz]
    }
}

/// H¹ norm in one characterization; the Neumann flavor gives `H¹_{Δ_N}`.
pub fn h1_norm(
    f: &GridFunction,
    which: Characterization,
    flavor: Flavor,
    scales: &ScaleGrid,
    cfg: &OperatorConfig,
) -> Result<f64> {
    Ok(match which {
        Characterization::Area => norm(&area_function(f, flavor, scales)?, Norm::L1),
        Characterization::Max => norm(&radial_maximal(f, flavor, scales)?, Norm::L1),
        Characterization::Nontangential => norm(&nontangential_maximal(f, flavor, scales)?, Norm::L1),
        Characterization::Riesz => {
            let mut total = norm(f, Norm::L1);
            for l in 1..=f.grid.dimension {
                let r = match flavor {
                    Flavor::Neumann => apply_riesz(f, l, false, cfg)?,
                    Flavor::Classical => apply_classical_riesz(f, l, false, cfg)?,
                };
                total += norm(&r, Norm::L1);
            }
            total
        }
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BmoFlavor {
    Neumann,
    Classical,
    EvenPlus,
    EvenMinus,
}

/// Ball-family margin for the Neumann flavor: a ball of radius `r` is used
/// only if the box extends `NEUMANN_BALL_MARGIN·r` beyond it, so the
/// truncated heat mass of `e^{−r²Δ_N}` stays below `erfc(4) ≈ 1.5e−8`.
pub const NEUMANN_BALL_MARGIN: f64 = 8.0;

/// Sample indices of the ball `|x − c| < r`.
fn ball_samples(grid: &Grid, center: &[f64], r: f64) -> Vec<usize> {
    let n = grid.points_per_axis;
    let h = grid.spacing();
    let lo = |c: f64| (((c - r + grid.half_width) / h).floor().max(0.0)) as usize;
    let hi = |c: f64| ((((c + r + grid.half_width) / h).ceil()) as usize).min(n);
    let mut out = Vec::new();
    match grid.dimension {
        1 => {
            for i in lo(center[0])..hi(center[0]) {
                if (grid.coord(i) - center[0]).abs() < r {
                    out.push(i);
                }
            }
        }
        _ => {
            for i1 in lo(center[0])..hi(center[0]) {
                let dx = grid.coord(i1) - center[0];
                for i2 in lo(center[1])..hi(center[1]) {
                    let dy = grid.coord(i2) - center[1];
                    if dx * dx + dy * dy < r * r {
                        out.push(i1 * n + i2);
                    }
                }
            }
        }
    }
    out
}

/// Dyadic balls: radii `2^k h`, centers on the lattice `r·ℤⁿ`, kept when
/// `|c|_∞ + (1 + margin)·r ≤ L`.
pub fn dyadic_balls(grid: &Grid, margin: f64) -> Vec<(Vec<f64>, f64)> {
    let l = grid.half_width;
    let mut out = Vec::new();
    let mut r = grid.spacing();
    while (1.0 + margin) * r <= l * (1.0 + 1e-12) {
        let jmax = ((l - (1.0 + margin) * r) / r + 1e-9).floor() as i64;
        let js: Vec<i64> = (-jmax..=jmax).collect();
        match grid.dimension {
            1 => js.iter().for_each(|&j| out.push((vec![j as f64 * r], r))),
            _ => {
                for &a in &js {
                    for &b in &js {
                        out.push((vec![a as f64 * r, b as f64 * r], r));
                    }
                }
            }
        }
        r *= 2.0;
    }
    out
}

/// BMO norm over the dyadic ball family; the Neumann flavor subtracts the
/// semigroup average `e^{−r²Δ_N} b` instead of the ball mean.
pub fn bmo_norm(b: &GridFunction, flavor: BmoFlavor) -> Result<f64> {
    let g = b.grid;
    match flavor {
        BmoFlavor::EvenPlus => return bmo_norm(&even_extension(b, Half::Plus), BmoFlavor::Classical),
        BmoFlavor::EvenMinus => return bmo_norm(&even_extension(b, Half::Minus), BmoFlavor::Classical),
        _ => {}
    }
    let margin = if flavor == BmoFlavor::Neumann { NEUMANN_BALL_MARGIN } else { 0.0 };
    let balls = dyadic_balls(&g, margin);
    let mut radii: Vec<f64> = balls.iter().map(|b| b.1).collect();
    radii.dedup();
    let mut best = 0.0f64;
    for r in radii {
        let avg = if flavor == BmoFlavor::Neumann { Some(apply_semigroup(b, r * r, Flavor::Neumann)?) } else { None };
        let osc: Vec<f64> = balls
            .par_iter()
            .filter(|(_, rr)| *rr == r)
            .map(|(c, _)| {
                let idx = ball_samples(&g, c, r);
                if idx.is_empty() {
                    return 0.0;
                }
                let cnt = idx.len() as f64;
                match &avg {
                    Some(a) => idx.iter().map(|&i| (b.values[i] - a.values[i]).abs()).sum::<f64>() / cnt,
                    None => {
                        let mean = idx.iter().map(|&i| b.values[i]).sum::<f64>() / cnt;
                        idx.iter().map(|&i| (b.values[i] - mean).abs()).sum::<f64>() / cnt
                    }
                }
            })
            .collect();
        best = osc.into_iter().fold(best, f64::max);
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{integrate, restrict};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn grid1() -> Grid {
        Grid::new(1, 8.0, 512).unwrap()
    }

    fn mean_zero_halves(grid: Grid, rng: &mut ChaCha8Rng) -> GridFunction {
        let mut f = GridFunction::zeros(grid);
        for half in Half::both() {
            let sgn = if half == Half::Plus { 1.0 } else { -1.0 };
            let c1 = sgn * rng.gen_range(1.0..5.0);
            let c2 = sgn * rng.gen_range(1.0..5.0);
            let w = rng.gen_range(0.3..1.0);
            let p = GridFunction::from_fn(grid, |x| (-(x[0] - c1).powi(2) / (w * w)).exp());
            let q = GridFunction::from_fn(grid, |x| (-(x[0] - c2).powi(2) / (w * w)).exp());
            let p = restrict(&p, half);
            let q = restrict(&q, half);
            let k = integrate(&p) / integrate(&q);
            f = f.add(&p.sub(&q.scale(k)));
        }
        f
    }

    #[test]
    fn scale_grid_bounds() {
        let g = grid1();
        let s = ScaleGrid::for_grid(&g, 48);
        let ts = s.heat_times();
        assert_eq!(ts.len(), 48);
        assert!((ts[0] - g.spacing().powi(2) / 4.0).abs() < 1e-15);
        assert!((ts[47] - 256.0).abs() < 1e-9);
        assert!(ScaleGrid::new(&g, 1e-9, 1.0, 10).is_err());
        assert!(ScaleGrid::new(&g, 0.01, 1e6, 10).is_err());
        assert!(ScaleGrid::new(&g, 0.01, 1.0, 10).is_ok());
    }

    #[test]
    fn sliding_max_matches_naive() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let v: Vec<f64> = (0..50).map(|_| rng.gen_range(-1.0..1.0)).collect();
        for m in [0, 1, 3, 60] {
            let s = sliding_max(&v, m);
            for i in 0..v.len() {
                let lo = i.saturating_sub(m);
                let hi = (i + m).min(v.len() - 1);
                let naive = v[lo..=hi].iter().cloned().fold(f64::MIN, f64::max);
                assert_eq!(s[i], naive);
            }
        }
    }

    #[test]
    fn radial_maximal_examples() {
        let g = grid1();
        let sc = ScaleGrid::for_grid(&g, 48);
        let chi = GridFunction::from_fn(g, |x| if x[0].abs() <= 1.0 { 1.0 } else { 0.0 });
        let m = radial_maximal(&chi, Flavor::Classical, &sc).unwrap();
        let i = g.cell_of(1e-9).unwrap();
        assert!((m.values[i] - 1.0).abs() < 0.02);
        for &s in sc.heat_times().iter().step_by(7) {
            let u = apply_semigroup(&chi, s, Flavor::Classical).unwrap();
            assert!(m.values.iter().zip(&u.values).all(|(a, b)| *a >= b.abs()));
        }
        assert!(m.values.iter().all(|v| *v >= 0.0));
    }

    #[test]
    fn neumann_maximal_reduces_to_even_extension() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let g = grid1();
        let sc = ScaleGrid::for_grid(&g, 24);
        let f = mean_zero_halves(g, &mut rng);
        let a = radial_maximal(&f, Flavor::Neumann, &sc).unwrap();
        let b = radial_maximal(&even_extension(&f, Half::Plus), Flavor::Classical, &sc).unwrap();
        for i in 0..g.len() {
            if g.half_of(i) == Half::Plus {
                assert!((a.values[i] - b.values[i]).abs() < 1e-8);
            }
        }
        // exact half identity
        let lhs = norm(&a, Norm::L1);
        let bm = radial_maximal(&even_extension(&f, Half::Minus), Flavor::Classical, &sc).unwrap();
        let rhs = 0.5 * (norm(&b, Norm::L1) + norm(&bm, Norm::L1));
        assert!((lhs - rhs).abs() < 1e-10 * lhs);
    }

    #[test]
    fn nontangential_sandwiches() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for (dim, n, l) in [(1, 256, 8.0), (2, 32, 4.0)] {
            let g = Grid::new(dim, l, n).unwrap();
            let sc = ScaleGrid::for_grid(&g, 16);
            let f = GridFunction::from_fn(g, |x| {
                let c = if dim == 1 { 0.0 } else { x[0] };
                (x[dim - 1] - 1.0).sin() * (-(x[dim - 1] - 1.5).powi(2) - c * c).exp() + 0.3 * (x[dim - 1] * 2.0).cos()
            });
            let _ = rng.gen::<u8>();
            let star = nontangential_maximal(&f, Flavor::Neumann, &sc).unwrap();
            let plus = nontangential_maximal(&even_extension(&f, Half::Plus), Flavor::Classical, &sc).unwrap();
            let minus = nontangential_maximal(&even_extension(&f, Half::Minus), Flavor::Classical, &sc).unwrap();
            let rad = radial_maximal(&f, Flavor::Neumann, &sc).unwrap();
            for i in 0..g.len() {
                assert!(star.values[i] >= rad.values[i] - 1e-15);
                assert!(star.values[i] <= plus.values[i] + minus.values[i] + 1e-8);
                if g.half_of(i) == Half::Plus {
                    assert!(plus.values[i] <= 2.0 * star.values[i] + 1e-8);
                }
            }
        }
    }

    #[test]
    fn reverse_sandwich_fails_across_the_hyperplane() {
        // f lives in ℝ₊: at x < 0 the even extension sees the mirror image,
        // while the Neumann cone only reaches ℝ₊ at large apertures.
        let g = grid1();
        let sc = ScaleGrid::for_grid(&g, 24);
        let f = GridFunction::from_fn(g, |x| (-(x[0] - 5.0).powi(2) * 4.0).exp());
        let star = nontangential_maximal(&f, Flavor::Neumann, &sc).unwrap();
        let plus = nontangential_maximal(&even_extension(&f, Half::Plus), Flavor::Classical, &sc).unwrap();
        let i = g.cell_of(-5.0 + 1e-9).unwrap();
        assert!(plus.values[i] > 2.0 * star.values[i]);
    }

    #[test]
    fn area_function_basics() {
        let g = grid1();
        // largest kernel width √s = 0.5 keeps the box edge 8 widths away from |x| < 4
        let sc = ScaleGrid::new(&g, g.spacing().powi(2) / 4.0, 0.25, 24).unwrap();
        let one = GridFunction::constant(g, 1.0);
        let s = area_function(&one, Flavor::Neumann, &sc).unwrap();
        for i in 0..g.len() {
            if g.coord(i).abs() < 4.0 {
                assert!(s.values[i] < 1e-6, "{}", s.values[i]);
            }
        }
        let f = GridFunction::from_fn(g, |x| (x[0] * 1.3).sin() * (-x[0] * x[0] / 4.0).exp());
        let a = area_function(&f, Flavor::Neumann, &sc).unwrap();
        let b = area_function(&f.scale(-2.5), Flavor::Neumann, &sc).unwrap();
        for i in 0..g.len() {
            assert!((b.values[i] - 2.5 * a.values[i]).abs() <= 1e-12 * b.values[i].max(1e-300), "{} {}", b.values[i], a.values[i]);
        }
    }

    #[test]
    fn area_identity_holds_for_symmetric_functions() {
        // For reflection-symmetric f both even extensions equal f and the
        // Neumann and classical fields coincide everywhere.
        let g = grid1();
        let sc = ScaleGrid::for_grid(&g, 24);
        let f = GridFunction::from_fn(g, |x| (x[0] * 0.9).cos() * (-x[0] * x[0] / 3.0).exp());
        let sn = area_function(&f, Flavor::Neumann, &sc).unwrap();
        let sp = area_function(&even_extension(&f, Half::Plus), Flavor::Classical, &sc).unwrap();
        let sm = area_function(&even_extension(&f, Half::Minus), Flavor::Classical, &sc).unwrap();
        for i in 0..g.len() {
            let rhs = 0.5 * (sp.values[i].powi(2) + sm.values[i].powi(2));
            if sn.values[i] > 1e-10 {
                assert!((sn.values[i].powi(2) - rhs).abs() <= 1e-6 * rhs);
            }
        }
    }

    #[test]
    fn h1_norms_vanish_on_zero() {
        let g = Grid::new(1, 4.0, 128).unwrap();
        let sc = ScaleGrid::for_grid(&g, 12);
        let z = GridFunction::zeros(g);
        for c in Characterization::all() {
            assert_eq!(h1_norm(&z, c, Flavor::Neumann, &sc, &OperatorConfig::default()).unwrap(), 0.0);
        }
    }

    #[test]
    fn bmo_examples() {
        let g = grid1();
        for fl in [BmoFlavor::Neumann, BmoFlavor::Classical, BmoFlavor::EvenPlus, BmoFlavor::EvenMinus] {
            assert!(bmo_norm(&GridFunction::constant(g, 3.0), fl).unwrap() < 1e-6);
        }
        let step = GridFunction::from_fn(g, |x| if x[0] > 0.0 { 1.0 } else { 0.0 });
        assert!(bmo_norm(&step, BmoFlavor::Neumann).unwrap() < 1e-6);
        assert!(bmo_norm(&step, BmoFlavor::Classical).unwrap() >= 0.4);
        let two = GridFunction::from_fn(g, |x| if x[0] > 0.0 { -2.0 } else { 5.0 });
        assert!(bmo_norm(&two, BmoFlavor::Neumann).unwrap() < 1e-6);
    }

    #[test]
    fn bmo_ball_counts() {
        let g = Grid::new(1, 4.0, 64).unwrap();
        let h = g.spacing();
        for (c, r) in dyadic_balls(&g, 0.0) {
            let idx = ball_samples(&g, &c, r);
            assert_eq!(idx.len() as f64, (2.0 * r / h).round());
        }
        let g2 = Grid::new(2, 2.0, 32).unwrap();
        let step = GridFunction::from_fn(g2, |x| if x[1] > 0.0 { 1.0 } else { 0.0 });
        assert!(bmo_norm(&step, BmoFlavor::Neumann).unwrap() < 1e-6);
        assert!(bmo_norm(&step, BmoFlavor::Classical).unwrap() >= 0.4);
    }

    #[test]
    fn disc_rows_open_disc() {
        let rows = disc_rows(2.0, 1.0);
        // |d| < 2: d1 = 0 → |d2| ≤ 1, d1 = 1 → |d2| ≤ 1
        assert_eq!(rows, vec![1, 1]);
        assert_eq!(cone_reach(2.0, 1.0), 1);
        assert_eq!(cone_reach(2.5, 1.0), 2);
    }

    #[test]
    fn monotone_in_scale_refinement() {
        let g = Grid::new(1, 4.0, 128).unwrap();
        let coarse = ScaleGrid::for_grid(&g, 9);
        let fine = ScaleGrid::for_grid(&g, 17); // contains the coarse samples
        let f = GridFunction::from_fn(g, |x| (x[0] * 2.0).sin() * (-x[0] * x[0]).exp());
        for fl in [Flavor::Classical, Flavor::Neumann] {
            let a = radial_maximal(&f, fl, &coarse).unwrap();
            let b = radial_maximal(&f, fl, &fine).unwrap();
            assert!(a.values.iter().zip(&b.values).all(|(x, y)| x <= &(y + 1e-15)));
            let a = nontangential_maximal(&f, fl, &coarse).unwrap();
            let b = nontangential_maximal(&f, fl, &fine).unwrap();
            assert!(a.values.iter().zip(&b.values).all(|(x, y)| x <= &(y + 1e-15)));
        }
    }
}
