//! Two-bump norm, Riesz mass, single-atom and iterative factorization.

use rand::Rng;

use neumann_lab::atoms::haar_atomic_decomposition;
use neumann_lab::factorization::{approx_factor_atom, riesz_mass_scaling, two_bump_h1_norm, weak_factorize, HChoice};
use neumann_lab::functionals::{h1_norm, Characterization};
use neumann_lab::grid::integrate;
use neumann_lab::{Flavor, Grid, GridFunction, OperatorConfig};

use super::{rng, spread};
use crate::config::ExperimentConfig;
use crate::inputs::{bump_derivative, haar_atom};
use crate::report::{ExperimentReport, MetricRow, Table};
use crate::tolerances as tol;
use crate::LabCliError;

/// Cells per bump radius in the two-bump geometry.
const TWO_BUMP_CELLS_PER_RADIUS: f64 = 8.0;

/// Grid for bumps at `y₀ = 2r`, `x₀ = y₀ + M r`: the smallest power-of-two
/// half-width with room for `M r` beyond the far bump.
fn two_bump_grid(m: f64, r: f64) -> Result<Grid, LabCliError> {
    let need = 2.0 * r + m * r + r + m * r;
    let l = 2f64.powi(need.log2().ceil() as i32);
    let n = (2.0 * l * TWO_BUMP_CELLS_PER_RADIUS / r).round() as usize;
    Ok(Grid::new(1, l, n)?)
}

pub fn run_two_bump(cfg: &ExperimentConfig, rep: &mut ExperimentReport) -> Result<(), LabCliError> {
    let mut table = Table::new("two_bump", &["M", "L", "N", "norm", "norm_over_log_m"]);
    let mut ratios = vec![];
    let mut norms = vec![];
    for &m in &cfg.m_list {
        let grid = two_bump_grid(m, 1.0)?;
        let v = two_bump_h1_norm(m, 1.0, grid)?;
        table.push(vec![m, grid.half_width, grid.points_per_axis as f64, v, v / m.ln()]);
        ratios.push(v / m.ln());
        norms.push(v);
    }
    rep.push(MetricRow::at_most(8, "two_bump_norm_over_log_m_spread", spread(&ratios) - 1.0, tol::TWO_BUMP_SPREAD));
    rep.fit("two_bump_c", ratios.iter().cloned().fold(0.0, f64::max));
    let monotone = norms.windows(2).all(|w| w[1] > w[0]);
    rep.push(MetricRow::info("two_bump_monotone_in_m", if monotone { 1.0 } else { 0.0 }));
    // dilation: r = 1 against r = 2 with the box and spacing scaled alike;
    // the indicators are unnormalized, so the norm carries a factor rⁿ
    let m0 = cfg.m_list[0];
    let g1 = two_bump_grid(m0, 1.0)?;
    let a = two_bump_h1_norm(m0, 1.0, g1)?;
    let b = two_bump_h1_norm(m0, 2.0, two_bump_grid(m0, 2.0)?)? / 2f64.powi(g1.dimension as i32);
    rep.push(MetricRow::info("two_bump_dilation_rel_change", (a - b).abs() / a));
    rep.tables.push(table);
    Ok(())
}

pub fn run_riesz_mass(cfg: &ExperimentConfig, rep: &mut ExperimentReport) -> Result<(), LabCliError> {
    let mut table = Table::new("riesz_mass", &["n", "M", "value", "two_over_pi_m"]);
    for n in 1..=2usize {
        let fit = riesz_mass_scaling(&cfg.m_list, 1.0, 1, n)?;
        for (m, v) in fit.ms.iter().zip(&fit.values) {
            table.push(vec![n as f64, *m, *v, 2.0 / (std::f64::consts::PI * m)]);
        }
        rep.push(MetricRow::at_most(
            9,
            &format!("riesz_mass_slope_dev_n{n}"),
            (fit.slope + n as f64).abs(),
            tol::RIESZ_MASS_SLOPE,
        ));
        rep.fit(&format!("riesz_mass_slope_n{n}"), fit.slope);
        rep.push(MetricRow::info(&format!("riesz_mass_slope_minus_stated_exponent_n{n}"), fit.slope - n as f64));
        if n == 1 {
            let m = *fit.ms.last().expect("nonempty M list");
            let v = *fit.values.last().expect("nonempty M list");
            let pred = 2.0 / (std::f64::consts::PI * m);
            rep.push(MetricRow::at_most(9, "riesz_mass_value_rel_dev_largest_m", (v - pred).abs() / pred, tol::RIESZ_MASS_VALUE));
        }
        rep.push(MetricRow::condition(
            9,
            &format!("riesz_mass_min_value_n{n}"),
            fit.values.iter().cloned().fold(f64::INFINITY, f64::min),
            0.0,
            fit.values.iter().all(|v| *v > 0.0),
        ));
    }
    rep.tables.push(table);
    Ok(())
}

struct AtomRun {
    residual_h1: Vec<f64>,
    cost_c: Vec<f64>,
    envelope_c: Vec<f64>,
    mean: f64,
}

fn factor_sweep(cfg: &ExperimentConfig, f: &GridFunction, table: &mut Table, tag: f64) -> Result<AtomRun, LabCliError> {
    let grid = f.grid;
    let scales = cfg.scales.build(&grid)?;
    let ops = OperatorConfig::default();
    let d = haar_atomic_decomposition(f, None)?;
    if d.terms.len() != 1 {
        return Err(LabCliError::InvalidConfig("test atom is not a single Haar atom".into()));
    }
    let atom = &d.terms[0].1;
    let mut out = AtomRun { residual_h1: vec![], cost_c: vec![], envelope_c: vec![], mean: 0.0 };
    for &eps in &cfg.epsilons {
        let (pair, w) = approx_factor_atom(atom, eps, cfg.l, HChoice::Balanced, &ops)?;
        let h1 = h1_norm(&w, Characterization::Max, Flavor::Neumann, &scales, &ops)?;
        let cc = pair.cost_constant();
        let ec = pair.envelope_constant(&w);
        let mean = integrate(&w).abs();
        table.push(vec![tag, atom.ball.radius, eps, pair.m as f64, h1, cc, ec, mean]);
        out.residual_h1.push(h1);
        out.cost_c.push(cc);
        out.envelope_c.push(ec);
        out.mean = out.mean.max(mean);
    }
    Ok(out)
}

pub fn run_factorize_atom(cfg: &ExperimentConfig, rep: &mut ExperimentReport) -> Result<(), LabCliError> {
    let grid = cfg.grid.build()?;
    let mut table =
        Table::new("factorize_atom", &["atom", "r", "epsilon", "M", "residual_h1", "cost_c", "envelope_c", "residual_mean"]);
    // unit Haar atoms on dyadic intervals; the first calibrates the constants
    let atoms = [(12.125, 0.125), (12.0625, 0.0625), (-12.125, 0.125), (8.03125, 0.03125)];
    let mut runs = vec![];
    for (k, &(c, r)) in atoms.iter().enumerate() {
        runs.push(factor_sweep(cfg, &haar_atom(grid, c, r), &mut table, k as f64)?);
    }
    // epsilons are listed from large to small
    let decreasing = runs.iter().all(|r| r.residual_h1.windows(2).all(|w| w[1] < w[0]));
    let last = runs[0].residual_h1.last().copied().unwrap_or(f64::NAN);
    rep.push(MetricRow::condition(10, "residual_h1_decreasing_in_epsilon", last, f64::NAN, decreasing));
    let cost_fit = runs[0].cost_c.iter().cloned().fold(0.0, f64::max);
    let env_fit = runs[0].envelope_c.iter().cloned().fold(0.0, f64::max);
    let cost_check = runs[1..].iter().flat_map(|r| r.cost_c.iter().cloned()).fold(0.0, f64::max);
    let env_check = runs[1..].iter().flat_map(|r| r.envelope_c.iter().cloned()).fold(0.0, f64::max);
    rep.fit("pair_cost_c", cost_fit);
    rep.fit("residual_envelope_c", env_fit);
    rep.push(MetricRow::at_most(10, "pair_cost_verify_over_fit", cost_check / cost_fit, tol::FIT_HEADROOM));
    rep.push(MetricRow::at_most(10, "residual_mean_max", runs.iter().map(|r| r.mean).fold(0.0, f64::max), tol::RESIDUAL_MEAN));
    rep.push(MetricRow::at_most(10, "residual_envelope_verify_over_fit", env_check / env_fit, tol::FIT_HEADROOM));
    for (k, eps) in cfg.epsilons.iter().enumerate() {
        rep.push(MetricRow::info(&format!("residual_h1_eps_{eps}"), runs[0].residual_h1[k]));
    }
    rep.tables.push(table);
    Ok(())
}

/// Five half-mean-zero inputs built from dyadic-block pieces.
pub fn weak_factorize_inputs(grid: Grid, seed: u64) -> Vec<(String, GridFunction)> {
    let mut r = rng(seed);
    let h = grid.spacing();
    let single = haar_atom(grid, 12.125, 0.125);
    let pair = haar_atom(grid, 12.125, 0.125).sub(&haar_atom(grid, -4.0625, 0.0625).scale(0.5));
    let smooth = bump_derivative(grid, 12.125, 0.125);
    // random values on the cells of [-12.25, -12), mean removed
    let (lo, hi) = (-12.25, -12.0);
    let vals: Vec<f64> = (0..grid.len())
        .map(|i| {
            let x = grid.coord(i);
            if x > lo && x < hi {
                r.gen_range(-1.0..1.0)
            } else {
                0.0
            }
        })
        .collect();
    let raw = GridFunction::new(grid, vals).expect("grid-sized values");
    let cells = ((hi - lo) / h).round();
    let m = integrate(&raw) / (cells * h);
    let random = raw.map(|v| if v != 0.0 { v - m } else { 0.0 });
    let mut mixed = GridFunction::zeros(grid);
    for &(c, rr) in &[(9.0625, 0.0625), (-9.5625, 0.0625), (3.125, 0.125)] {
        mixed.axpy(r.gen_range(-1.0..1.0), &haar_atom(grid, c, rr));
    }
    mixed.axpy(0.5, &bump_derivative(grid, -5.125, 0.125));
    vec![
        ("single_atom".into(), single),
        ("atom_pair".into(), pair),
        ("smooth".into(), smooth),
        ("random_block".into(), random),
        ("mixed".into(), mixed),
    ]
}

pub fn run_weak_factorize(cfg: &ExperimentConfig, rep: &mut ExperimentReport) -> Result<(), LabCliError> {
    let grid = cfg.grid.build()?;
    let ops = OperatorConfig::default();
    let eps = *cfg.epsilons.last().expect("nonempty epsilon list");
    let mut table = Table::new("weak_factorize", &["input", "level", "atoms", "residual_h1", "ratio", "cost"]);
    let (mut decreasing, mut max_ratio, mut recon) = (true, 0.0f64, 0.0f64);
    let mut cost_ratios = vec![];
    for (k, (_, f)) in weak_factorize_inputs(grid, cfg.seed).iter().enumerate().take(cfg.samples) {
        let led = weak_factorize(f, eps, cfg.l, cfg.k_max, HChoice::Balanced, &ops)?;
        let ratios = led.ratios();
        decreasing &= ratios.iter().all(|r| *r < 1.0) && !ratios.is_empty();
        max_ratio = max_ratio.max(ratios.iter().cloned().fold(0.0, f64::max));
        recon = recon.max(led.reconstruction_error(f));
        cost_ratios.push(led.total_l1_cost / led.initial_h1);
        table.push(vec![k as f64, 0.0, 0.0, led.initial_h1, 1.0, 0.0]);
        for (j, (lv, r)) in led.levels.iter().zip(&ratios).enumerate() {
            table.push(vec![k as f64, (j + 1) as f64, lv.terms.len() as f64, lv.residual_h1, *r, lv.cost()]);
        }
    }
    rep.push(MetricRow::condition(11, "residuals_strictly_decreasing", max_ratio, 1.0, decreasing));
    rep.push(MetricRow::at_most(11, "residual_ratio_max", max_ratio, tol::FACTOR_RATIO));
    rep.push(MetricRow::at_most(11, "reconstruction_l2", recon, tol::RECONSTRUCTION));
    rep.fit("ratio_over_epsilon", max_ratio / eps);
    rep.push(MetricRow::info("cost_over_h1_min", cost_ratios.iter().cloned().fold(f64::INFINITY, f64::min)));
    rep.push(MetricRow::info("cost_over_h1_max", cost_ratios.iter().cloned().fold(0.0, f64::max)));
    rep.tables.push(table);
    Ok(())
}
