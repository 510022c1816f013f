//! Pointwise kernel checks: Gaussian bound, gradient bound, Riesz kernel.

use rand::Rng;

use neumann_lab::kernels::{heat_kernel_gradient, neumann_heat_kernel, riesz_kernel_components, riesz_time_integral};

use super::rng;
use crate::config::ExperimentConfig;
use crate::report::{ExperimentReport, MetricRow, Table};
use crate::tolerances as tol;
use crate::LabCliError;

/// `(t, x, y)` with `x`, `y` in the same closed half-space; `|x − y| ≲ 10√t`.
fn same_half_triple<R: Rng>(r: &mut R, n: usize) -> (f64, Vec<f64>, Vec<f64>) {
    let t = 10f64.powf(r.gen_range(-3.0..2.0));
    let sgn = if r.gen_bool(0.5) { 1.0 } else { -1.0 };
    let mut x: Vec<f64> = (0..n).map(|_| r.gen_range(-5.0..5.0)).collect();
    x[n - 1] = sgn * r.gen_range(0.0..5.0);
    let mut y: Vec<f64> = x.iter().map(|c| c + t.sqrt() * r.gen_range(-10.0..10.0)).collect();
    y[n - 1] = sgn * y[n - 1].abs();
    (t, x, y)
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

fn gaussian_bound(t: f64, x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let d2: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
    2.0 * (4.0 * std::f64::consts::PI * t).powf(-n / 2.0) * (-d2 / (4.0 * t)).exp()
}

/// `|∇p|·(√t + |x − y|)^{n+2}/√t` over both gradients `∇_x`, `∇_y`.
fn gradient_ratio(t: f64, x: &[f64], y: &[f64]) -> Result<f64, LabCliError> {
    let n = x.len() as i32;
    let d = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
    let gx = norm2(&heat_kernel_gradient(t, x, y)?);
    let gy = norm2(&heat_kernel_gradient(t, y, x)?);
    Ok(gx.max(gy) * (t.sqrt() + d).powi(n + 2) / t.sqrt())
}

pub fn run(cfg: &ExperimentConfig, rep: &mut ExperimentReport) -> Result<(), LabCliError> {
    let mut r = rng(cfg.seed);

    // Gaussian upper bound
    let mut violations = 0usize;
    let mut worst = 0.0f64;
    for k in 0..cfg.samples {
        let n = 1 + k % 2;
        let (t, x, y) = same_half_triple(&mut r, n);
        let p = neumann_heat_kernel(t, &x, &y)?;
        let b = gaussian_bound(t, &x, &y);
        if b > 0.0 {
            worst = worst.max(p / b);
        }
        if p > b * (1.0 + 1e-12) {
            violations += 1;
        }
    }
    rep.push(MetricRow::at_most(4, "gaussian_bound_violations", violations as f64, tol::GAUSSIAN_VIOLATIONS));
    rep.push(MetricRow::info("gaussian_bound_max_ratio", worst));

    // gradient against central differences
    let mut fd_err = 0.0f64;
    let mut fd_table = Table::new("gradient_fd", &["n", "t", "rel_err"]);
    for k in 0..2000 {
        let n = 1 + k % 2;
        let (t, x, y) = same_half_triple(&mut r, n);
        let d = (0..n).map(|i| (x[i] - y[i]).powi(2)).sum::<f64>().sqrt();
        if d > 6.0 * t.sqrt() {
            continue;
        }
        let delta = 1e-3 * t.sqrt();
        if x[n - 1].abs() < 3.0 * delta {
            // a difference across the hyperplane would see the jump
            continue;
        }
        let an = heat_kernel_gradient(t, &x, &y)?;
        // five-point centered stencil
        let fd: Vec<f64> = (0..n)
            .map(|i| {
                let at = |k: f64| {
                    let mut z = x.clone();
                    z[i] += k * delta;
                    neumann_heat_kernel(t, &z, &y)
                };
                Ok((8.0 * (at(1.0)? - at(-1.0)?) - (at(2.0)? - at(-2.0)?)) / (12.0 * delta))
            })
            .collect::<Result<_, LabCliError>>()?;
        let diff: Vec<f64> = an.iter().zip(&fd).map(|(a, b)| a - b).collect();
        let scale = norm2(&an).max(1e-6 * t.powf(-(n as f64 + 1.0) / 2.0));
        let e = norm2(&diff) / scale;
        fd_table.push(vec![n as f64, t, e]);
        fd_err = fd_err.max(e);
    }
    rep.push(MetricRow::at_most(5, "gradient_fd_rel_err", fd_err, tol::GRADIENT_FD));
    rep.tables.push(fd_table);

    // gradient size bound: fit on one sweep, verify on a disjoint one
    let sweep = |seed: u64| -> Result<f64, LabCliError> {
        let mut rs = rng(seed);
        let mut m = 0.0f64;
        for k in 0..5000 {
            let (t, x, y) = same_half_triple(&mut rs, 1 + k % 2);
            m = m.max(gradient_ratio(t, &x, &y)?);
        }
        Ok(m)
    };
    let c_fit = sweep(cfg.seed ^ 0xa5a5)?;
    let c_check = sweep(cfg.seed ^ 0x5a5a)?;
    rep.fit("gradient_bound_c", c_fit);
    rep.push(MetricRow::at_most(5, "gradient_bound_verify_over_fit", c_check / c_fit, tol::FIT_HEADROOM));

    // Riesz kernel: time integral against closed form
    let mut ti_err = 0.0f64;
    let mut cf_err = 0.0f64;
    let mut riesz_table = Table::new("riesz_kernel", &["n", "l", "closed_form", "time_integral", "rel_err"]);
    for k in 0..1000 {
        let n = 1 + k % 2;
        let l = 1 + (k / 2) % n;
        let sgn = if r.gen_bool(0.5) { 1.0 } else { -1.0 };
        let mut x: Vec<f64> = (0..n).map(|_| r.gen_range(-3.0..3.0)).collect();
        let mut y: Vec<f64> = (0..n).map(|_| r.gen_range(-3.0..3.0)).collect();
        x[n - 1] = sgn * r.gen_range(0.01..3.0);
        y[n - 1] = sgn * r.gen_range(0.01..3.0);
        let (rc, kc) = riesz_kernel_components(l, &x, &y)?;
        let cf = rc + kc;
        let ti = riesz_time_integral(l, &x, &y)?;
        let d = (0..n).map(|i| (x[i] - y[i]).powi(2)).sum::<f64>().sqrt();
        let e = (ti - cf).abs() / cf.abs().max(1e-6 / d.powi(n as i32));
        riesz_table.push(vec![n as f64, l as f64, cf, ti, e]);
        ti_err = ti_err.max(e);
        if n == 1 {
            let (a, b) = (x[0], y[0]);
            let exact = -(1.0 / (a - b) + 1.0 / (a + b)) / std::f64::consts::PI;
            cf_err = cf_err.max((cf - exact).abs() / exact.abs());
        }
    }
    rep.push(MetricRow::at_most(6, "riesz_time_integral_rel_err", ti_err, tol::RIESZ_TIME_INTEGRAL));
    rep.push(MetricRow::at_most(6, "riesz_closed_form_1d_rel_err", cf_err, tol::RIESZ_CLOSED_FORM_1D));
    rep.tables.push(riesz_table);
    rep.push(MetricRow::info("gradient_bound_fit_sweep_max", c_fit));
    rep.push(MetricRow::info("gradient_bound_verify_sweep_max", c_check));
    Ok(())
}
