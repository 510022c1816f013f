//! Cell-centered box grids over [−L, L]ⁿ, grid functions, half-space
//! restriction and reflection, and midpoint quadrature.
//!
//! Samples sit at `(k + ½)h − L`, so with an even point count no sample lies
//! on the hyperplane `{x_n = 0}` and the reflection `x ↦ x̃` maps grid
//! indices to grid indices (`k ↦ N − 1 − k` along the last axis).

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

/// One of the two open half-spaces `{x_n > 0}` and `{x_n < 0}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Half {
    Plus,
    Minus,
}

impl Half {
    pub fn both() -> [Half; 2] {
        [Half::Plus, Half::Minus]
    }

    /// Half-space containing a point with last coordinate `xn`; `xn = 0` counts as plus.
    pub fn of(xn: f64) -> Half {
        if xn >= 0.0 {
            Half::Plus
        } else {
            Half::Minus
        }
    }
}

/// Uniform cell-centered grid on [−L, L]ⁿ with `N` points per axis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub dimension: usize,
    pub half_width: f64,
    pub points_per_axis: usize,
}

impl Grid {
    pub fn new(dimension: usize, half_width: f64, points_per_axis: usize) -> Result<Grid> {
        if !(dimension == 1 || dimension == 2) {
            return Err(LabError::InvalidGrid(format!("dimension {dimension} not in {{1,2}}")));
        }
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(LabError::InvalidGrid(format!("half width {half_width} must be positive")));
        }
        if points_per_axis < 2 || points_per_axis % 2 != 0 {
            return Err(LabError::InvalidGrid(format!(
                "points per axis {points_per_axis} must be even and at least 2"
            )));
        }
        Ok(Grid { dimension, half_width, points_per_axis })
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.points_per_axis as f64
    }

    /// Total number of samples, `Nⁿ`.
    pub fn len(&self) -> usize {
        self.points_per_axis.pow(self.dimension as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Cell volume `hⁿ`.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dimension as i32)
    }

    /// Coordinate of axis index `k`.
    pub fn coord(&self, k: usize) -> f64 {
        (k as f64 + 0.5) * self.spacing() - self.half_width
    }

    /// Axis coordinates of all samples along one axis.
    pub fn axis(&self) -> Vec<f64> {
        (0..self.points_per_axis).map(|k| self.coord(k)).collect()
    }

    /// Splits a flat index into per-axis indices (last axis fastest).
    pub fn unflatten(&self, idx: usize) -> Vec<usize> {
        let n = self.points_per_axis;
        match self.dimension {
            1 => vec![idx],
            _ => vec![idx / n, idx % n],
        }
    }

    pub fn flatten(&self, ks: &[usize]) -> usize {
        let n = self.points_per_axis;
        match self.dimension {
            1 => ks[0],
            _ => ks[0] * n + ks[1],
        }
    }

    /// Physical coordinates of the sample at a flat index.
    pub fn point(&self, idx: usize) -> Vec<f64> {
        self.unflatten(idx).into_iter().map(|k| self.coord(k)).collect()
    }

    /// Index along the last axis of a flat index.
    pub fn normal_index(&self, idx: usize) -> usize {
        idx % self.points_per_axis
    }

    pub fn half_of(&self, idx: usize) -> Half {
        if self.normal_index(idx) >= self.points_per_axis / 2 {
            Half::Plus
        } else {
            Half::Minus
        }
    }

    /// Flat index of the reflected sample `x̃`.
    pub fn reflect_index(&self, idx: usize) -> usize {
        let n = self.points_per_axis;
        let kn = idx % n;
        idx - kn + (n - 1 - kn)
    }

    /// Axis index of the cell containing coordinate `x`, if inside the box.
    pub fn cell_of(&self, x: f64) -> Option<usize> {
        let k = ((x + self.half_width) / self.spacing()).floor();
        if k >= 0.0 && (k as usize) < self.points_per_axis {
            Some(k as usize)
        } else {
            None
        }
    }

    pub fn contains_ball(&self, ball: &Ball) -> bool {
        ball.center.iter().all(|c| c.abs() + ball.radius <= self.half_width * (1.0 + 1e-12))
    }
}

/// Reflection across the hyperplane `{x_n = 0}`: `(x', x_n) ↦ (x', −x_n)`.
pub fn reflect_point(x: &[f64]) -> Vec<f64> {
    let mut y = x.to_vec();
    if let Some(last) = y.last_mut() {
        *last = -*last;
    }
    y
}

/// Samples of a real function on a grid, row-major with the last axis fastest.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction {
    pub grid: Grid,
    pub values: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct GridSidecar {
    dimension: usize,
    half_width: f64,
    points_per_axis: usize,
}

impl GridFunction {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<GridFunction> {
        if values.len() != grid.len() {
            return Err(LabError::InvalidGrid(format!(
                "expected {} samples, got {}",
                grid.len(),
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(LabError::InvalidGrid(format!("non-finite sample at index {i}")));
        }
        Ok(GridFunction { grid, values })
    }

    pub fn zeros(grid: Grid) -> GridFunction {
        GridFunction { grid, values: vec![0.0; grid.len()] }
    }

    pub fn constant(grid: Grid, c: f64) -> GridFunction {
        GridFunction { grid, values: vec![c; grid.len()] }
    }

    /// Samples `f` at every grid point.
    pub fn from_fn(grid: Grid, f: impl Fn(&[f64]) -> f64) -> GridFunction {
        let values = (0..grid.len()).map(|i| f(&grid.point(i))).collect();
        GridFunction { grid, values }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> GridFunction {
        GridFunction { grid: self.grid, values: self.values.iter().map(|&v| f(v)).collect() }
    }

    pub fn zip_with(&self, other: &GridFunction, f: impl Fn(f64, f64) -> f64) -> GridFunction {
        assert_eq!(self.grid, other.grid, "grid mismatch");
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect();
        GridFunction { grid: self.grid, values }
    }

    pub fn add(&self, other: &GridFunction) -> GridFunction {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &GridFunction) -> GridFunction {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &GridFunction) -> GridFunction {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn scale(&self, c: f64) -> GridFunction {
        self.map(|v| c * v)
    }

    /// `self += c·other`, in place.
    pub fn axpy(&mut self, c: f64, other: &GridFunction) {
        assert_eq!(self.grid, other.grid, "grid mismatch");
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a += c * b;
        }
    }

    /// L² inner product `∫ f g`.
    pub fn dot(&self, other: &GridFunction) -> f64 {
        assert_eq!(self.grid, other.grid, "grid mismatch");
        crate::simd::dot(&self.values, &other.values) * self.grid.cell_volume()
    }

    /// Writes `<stem>.csv` (header `x1[,x2],value`) and `<stem>.json` with grid metadata.
    pub fn write_csv(&self, stem: &Path) -> Result<()> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header: Vec<String> = (1..=self.grid.dimension).map(|a| format!("x{a}")).collect();
        header.push("value".into());
        w.write_record(&header)?;
        for (i, v) in self.values.iter().enumerate() {
            let mut rec: Vec<String> = self.grid.point(i).iter().map(|c| format!("{c:.17e}")).collect();
            rec.push(format!("{v:.17e}"));
            w.write_record(&rec)?;
        }
        let bytes = w.into_inner().map_err(|e| LabError::Io(e.into_error()))?;
        write_atomic(&with_ext(stem, "csv"), &bytes)?;
        let side = GridSidecar {
            dimension: self.grid.dimension,
            half_width: self.grid.half_width,
            points_per_axis: self.grid.points_per_axis,
        };
        write_atomic(&with_ext(stem, "json"), serde_json::to_string_pretty(&side)?.as_bytes())
    }

    /// Reads a function written by [`GridFunction::write_csv`].
    pub fn read_csv(stem: &Path) -> Result<GridFunction> {
        let side: GridSidecar = serde_json::from_str(&fs::read_to_string(with_ext(stem, "json"))?)?;
        let grid = Grid::new(side.dimension, side.half_width, side.points_per_axis)?;
        let mut r = csv::Reader::from_path(with_ext(stem, "csv"))?;
        let mut values = Vec::with_capacity(grid.len());
        for rec in r.records() {
            let rec = rec?;
            let v: f64 = rec
                .get(grid.dimension)
                .ok_or_else(|| LabError::InvalidGrid("short CSV record".into()))?
                .parse()
                .map_err(|e| LabError::InvalidGrid(format!("bad value: {e}")))?;
            values.push(v);
        }
        GridFunction::new(grid, values)
    }
}

fn with_ext(stem: &Path, ext: &str) -> PathBuf {
    let mut s = stem.as_os_str().to_owned();
    s.push(".");
    s.push(ext);
    PathBuf::from(s)
}

/// Writes through a temporary file in the same directory, then renames.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("out");
    let tmp = dir.join(format!(".{name}.tmp{}", std::process::id()));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Euclidean ball `B(center, radius)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub center: Vec<f64>,
    pub radius: f64,
}

impl Ball {
    pub fn new(center: Vec<f64>, radius: f64) -> Ball {
        assert!(radius > 0.0, "ball radius must be positive");
        Ball { center, radius }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        dist2(x, &self.center) < self.radius * self.radius
    }

    /// True when the ball meets both open half-spaces.
    pub fn straddles(&self) -> bool {
        self.center.last().map_or(false, |c| c.abs() < self.radius)
    }

    /// Lebesgue measure of the ball in dimension `n`.
    pub fn volume(&self, n: usize) -> f64 {
        match n {
            1 => 2.0 * self.radius,
            _ => std::f64::consts::PI * self.radius * self.radius,
        }
    }
}

pub fn dist2(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum()
}

/// Zeroes samples outside the tagged open half-space.
pub fn restrict(f: &GridFunction, half: Half) -> GridFunction {
    let g = f.grid;
    let values = f
        .values
        .iter()
        .enumerate()
        .map(|(i, &v)| if g.half_of(i) == half { v } else { 0.0 })
        .collect();
    GridFunction { grid: g, values }
}

/// Even extension `f_{±,e}` of the tagged half across `{x_n = 0}`.
pub fn even_extension(f: &GridFunction, half: Half) -> GridFunction {
    let g = f.grid;
    let values = (0..g.len())
        .map(|i| if g.half_of(i) == half { f.values[i] } else { f.values[g.reflect_index(i)] })
        .collect();
    GridFunction { grid: g, values }
}

/// Midpoint rule `hⁿ Σ f`, summed in index order.
pub fn integrate(f: &GridFunction) -> f64 {
    f.values.iter().sum::<f64>() * f.grid.cell_volume()
}

/// Integral over one open half-space.
pub fn integrate_half(f: &GridFunction, half: Half) -> f64 {
    let g = f.grid;
    let mut s = 0.0;
    for (i, v) in f.values.iter().enumerate() {
        if g.half_of(i) == half {
            s += v;
        }
    }
    s * g.cell_volume()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Norm {
    L1,
    L2,
    Linf,
}

/// Discrete Lᵖ norm with `hⁿ` weights (max modulus for `Linf`).
pub fn norm(f: &GridFunction, p: Norm) -> f64 {
    let w = f.grid.cell_volume();
    match p {
        Norm::L1 => f.values.iter().map(|v| v.abs()).sum::<f64>() * w,
        Norm::L2 => (f.values.iter().map(|v| v * v).sum::<f64>() * w).sqrt(),
        Norm::Linf => f.values.iter().fold(0.0, |m, v| m.max(v.abs())),
    }
}

/// Indicator of the samples inside `ball`.
pub fn ball_indicator(grid: Grid, ball: &Ball) -> GridFunction {
    if !grid.contains_ball(ball) {
        log::warn!("ball {:?} is not contained in the grid box; quadrature is truncated", ball);
    }
    GridFunction::from_fn(grid, |x| if ball.contains(x) { 1.0 } else { 0.0 })
}

/// Indicator of the axis-aligned cube `|x − c|_∞ < s`.
pub fn cube_indicator(grid: Grid, center: &[f64], half_side: f64) -> GridFunction {
    GridFunction::from_fn(grid, |x| {
        if x.iter().zip(center).all(|(a, c)| (a - c).abs() < half_side) {
            1.0
        } else {
            0.0
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn g1(l: f64, n: usize) -> Grid {
        Grid::new(1, l, n).unwrap()
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(Grid::new(3, 1.0, 8).is_err());
        assert!(Grid::new(1, 1.0, 7).is_err());
        assert!(Grid::new(1, -1.0, 8).is_err());
        let g = g1(2.0, 8);
        assert_eq!(g.spacing() * 8.0, 4.0);
    }

    #[test]
    fn reflect_examples() {
        assert_eq!(reflect_point(&[1.0, 2.0]), vec![1.0, -2.0]);
        assert_eq!(reflect_point(&[0.5]), vec![-0.5]);
    }

    #[test]
    fn no_sample_on_hyperplane() {
        let g = Grid::new(2, 3.0, 16).unwrap();
        for i in 0..g.len() {
            assert!(g.point(i)[1] != 0.0);
            let r = g.reflect_index(i);
            assert_eq!(g.point(r), reflect_point(&g.point(i)));
            assert_eq!(g.reflect_index(r), i);
        }
    }

    #[test]
    fn restrict_indicator_and_partition() {
        let g = g1(2.0, 16);
        let one = GridFunction::constant(g, 1.0);
        let p = restrict(&one, Half::Plus);
        for i in 0..g.len() {
            assert_eq!(p.values[i], if g.coord(i) > 0.0 { 1.0 } else { 0.0 });
        }
        let sign = GridFunction::from_fn(g, |x| x[0].signum());
        let m = restrict(&sign, Half::Minus);
        for i in 0..g.len() {
            assert_eq!(m.values[i], if g.coord(i) < 0.0 { -1.0 } else { 0.0 });
        }
    }

    #[test]
    fn even_extension_examples() {
        // h = 1, samples at ±0.5, ±1.5
        let g = g1(2.0, 4);
        let f = GridFunction::from_fn(g, |x| if x[0] > 0.0 && x[0] < 1.0 { x[0] } else { 0.0 });
        let e = even_extension(&f, Half::Plus);
        let k = g.cell_of(-0.5).unwrap();
        assert_eq!(g.coord(k), -0.5);
        assert_eq!(e.values[k], 0.5);
        // supported away from the hyperplane: mass doubles
        let g = g1(2.0, 16);
        let s = GridFunction::from_fn(g, |x| if x[0] > 0.5 { x[0] * x[0] } else { 0.0 });
        let ie = integrate(&even_extension(&s, Half::Plus));
        assert!((ie - 2.0 * integrate(&restrict(&s, Half::Plus))).abs() < 1e-12);
    }

    #[test]
    fn integrate_examples() {
        for n in [1, 2] {
            let g = Grid::new(n, 1.0, 10).unwrap();
            let one = GridFunction::constant(g, 1.0);
            assert!((integrate(&one) - 2f64.powi(n as i32)).abs() < 1e-12);
        }
        let g = Grid::new(1, 20.0, 4096).unwrap();
        let t = 0.1;
        let p = GridFunction::from_fn(g, |x| crate::kernels::classical_heat_kernel(t, x, &[0.0]).unwrap());
        assert!((integrate(&p) - 1.0).abs() < 1e-6);
    }

    #[test]
    fn norm_examples() {
        let g = g1(4.0, 256);
        let z = GridFunction::zeros(g);
        for p in [Norm::L1, Norm::L2, Norm::Linf] {
            assert_eq!(norm(&z, p), 0.0);
        }
        let chi = GridFunction::from_fn(g, |x| if (0.0..=1.0).contains(&x[0]) { 1.0 } else { 0.0 });
        assert!((norm(&chi, Norm::L1) - 1.0).abs() <= g.spacing());
    }

    #[test]
    fn ball_indicator_examples() {
        let g = g1(2.0, 64);
        let b = ball_indicator(g, &Ball::new(vec![0.0], 1.0));
        for i in 0..g.len() {
            assert_eq!(b.values[i], if g.coord(i).abs() < 1.0 { 1.0 } else { 0.0 });
        }
        let g2 = Grid::new(2, 2.0, 128).unwrap();
        let ball = Ball::new(vec![0.3, -0.2], 0.8);
        let v = integrate(&ball_indicator(g2, &ball));
        assert!((v - ball.volume(2)).abs() / ball.volume(2) < 2.0 * g2.spacing() / 0.8);
        let a = ball_indicator(g, &Ball::new(vec![-1.0], 0.5));
        let c = ball_indicator(g, &Ball::new(vec![1.0], 0.5));
        assert!(a.mul(&c).values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let g = Grid::new(2, 1.5, 6).unwrap();
        let f = GridFunction::from_fn(g, |x| x[0].sin() + 3.0 * x[1]);
        let stem = dir.path().join("f");
        f.write_csv(&stem).unwrap();
        let back = GridFunction::read_csv(&stem).unwrap();
        assert_eq!(back, f);
        let head = std::fs::read_to_string(dir.path().join("f.csv")).unwrap();
        assert!(head.starts_with("x1,x2,value"));
    }

    fn arb_fn(n: usize, pts: usize) -> impl Strategy<Value = GridFunction> {
        let g = Grid::new(n, 2.0, pts).unwrap();
        proptest::collection::vec(-10.0f64..10.0, g.len()).prop_map(move |v| GridFunction::new(g, v).unwrap())
    }

    proptest! {
        #[test]
        fn partition_is_exact(f in arb_fn(2, 8)) {
            let s = restrict(&f, Half::Plus).add(&restrict(&f, Half::Minus));
            prop_assert_eq!(s, f);
        }

        #[test]
        fn even_extension_is_symmetric(f in arb_fn(2, 8)) {
            for half in Half::both() {
                let e = even_extension(&f, half);
                for i in 0..e.values.len() {
                    prop_assert_eq!(e.values[i], e.values[e.grid.reflect_index(i)]);
                }
            }
        }

        #[test]
        fn reflection_is_involution(x in proptest::collection::vec(-5.0f64..5.0, 1..=2)) {
            prop_assert_eq!(reflect_point(&reflect_point(&x)), x);
        }

        #[test]
        fn quadrature_consistency(f in arb_fn(1, 32), g in arb_fn(1, 32), a in -3.0f64..3.0) {
            let lin = integrate(&f.scale(a).add(&g));
            prop_assert!((lin - (a * integrate(&f) + integrate(&g))).abs() < 1e-9);
            prop_assert!(integrate(&f).abs() <= norm(&f, Norm::L1) + 1e-12);
            let pos = f.map(f64::abs);
            prop_assert!(integrate(&pos) >= 0.0);
        }
    }
}
