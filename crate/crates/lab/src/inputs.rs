//! Seeded test-function generators.

use rand::Rng;

use neumann_lab::grid::{integrate_half, restrict};
use neumann_lab::{Grid, GridFunction, Half};

/// Sum of `k` Gaussian bumps with random centers, widths and signed amplitudes,
/// kept within `0.75 L` of the origin.
pub fn bumps<R: Rng>(grid: Grid, rng: &mut R, k: usize) -> GridFunction {
    let l = grid.half_width;
    let n = grid.dimension;
    let params: Vec<(Vec<f64>, f64, f64)> = (0..k)
        .map(|_| {
            let c: Vec<f64> = (0..n).map(|_| rng.gen_range(-0.75 * l..0.75 * l)).collect();
            let w = rng.gen_range(0.05..2.0) * l / 16.0 + 2.0 * grid.spacing();
            (c, w, rng.gen_range(-1.0..1.0))
        })
        .collect();
    GridFunction::from_fn(grid, |x| {
        params
            .iter()
            .map(|(c, w, a)| {
                let d2: f64 = x.iter().zip(c).map(|(p, q)| (p - q) * (p - q)).sum();
                a * (-d2 / (w * w)).exp()
            })
            .sum()
    })
}

/// Random bumps with the mean on each half-space removed by a fixed
/// Gaussian profile, so both half-space integrals vanish.
pub fn mean_zero_bumps<R: Rng>(grid: Grid, rng: &mut R, k: usize) -> GridFunction {
    let f = bumps(grid, rng, k);
    let n = grid.dimension;
    let l = grid.half_width;
    let mut out = f.clone();
    for half in Half::both() {
        let sgn = if half == Half::Plus { 1.0 } else { -1.0 };
        let c = sgn * 0.4 * l;
        let prof = restrict(
            &GridFunction::from_fn(grid, |x| (-(x[n - 1] - c).powi(2) / (0.1 * l * l)).exp()),
            half,
        );
        let k = integrate_half(&f, half) / integrate_half(&prof, half);
        out.axpy(-k, &prof);
    }
    out
}

/// Piecewise constant on `pieces` equal slabs along the first axis, values in `[−1, 1]`.
pub fn piecewise<R: Rng>(grid: Grid, rng: &mut R, pieces: usize) -> GridFunction {
    let vals: Vec<f64> = (0..pieces).map(|_| rng.gen_range(-1.0..1.0)).collect();
    GridFunction::from_fn(grid, |x| {
        let k = ((x[0] + grid.half_width) / (2.0 * grid.half_width) * pieces as f64) as usize;
        vals[k.min(pieces - 1)]
    })
}

/// Haar atom `±1/(2r)` on `[c − r, c + r]` (one dimension).
pub fn haar_atom(grid: Grid, center: f64, r: f64) -> GridFunction {
    GridFunction::from_fn(grid, |x| {
        let u = x[0] - center;
        if u.abs() < r {
            u.signum() / (2.0 * r)
        } else {
            0.0
        }
    })
}

/// `ψ'` for the bump `ψ(x) = (1 − ((x − c)/r)²)⁴` on `(c − r, c + r)`.
pub fn bump_derivative(grid: Grid, center: f64, r: f64) -> GridFunction {
    GridFunction::from_fn(grid, |x| {
        let u = (x[0] - center) / r;
        if u.abs() < 1.0 {
            -8.0 * u * (1.0 - u * u).powi(3) / r
        } else {
            0.0
        }
    })
}
