//! Duality pairing, commutator bound and Fefferman–Stein synthesis.

use rand::Rng;

use neumann_lab::functionals::{bmo_norm, BmoFlavor};
use neumann_lab::grid::{norm, Norm};
use neumann_lab::operators::{commutator, fs_synthesize, pi_form};
use neumann_lab::{Grid, GridFunction, OperatorConfig};

use super::{rng, spread};
use crate::config::ExperimentConfig;
use crate::inputs::{bumps, piecewise};
use crate::report::{ExperimentReport, MetricRow, Table};
use crate::tolerances as tol;
use crate::LabCliError;

/// `|⟨b, Π_l(h, g)⟩ − ⟨[b, R_{N,l}]g, h⟩|` relative to `‖b‖_∞‖g‖₂‖h‖₂`.
fn duality_gap(b: &GridFunction, g: &GridFunction, h: &GridFunction, l: usize, cfg: &OperatorConfig) -> Result<f64, LabCliError> {
    let lhs = b.dot(&pi_form(h, g, l, cfg)?);
    let rhs = commutator(b, g, l, cfg)?.dot(h);
    let scale = norm(b, Norm::Linf) * norm(g, Norm::L2) * norm(h, Norm::L2);
    Ok((lhs - rhs).abs() / scale)
}

pub fn run_duality(cfg: &ExperimentConfig, rep: &mut ExperimentReport) -> Result<(), LabCliError> {
    let ops = OperatorConfig::default();
    let mut r = rng(cfg.seed);
    let mut table = Table::new("duality", &["dimension", "l", "sample", "rel_gap"]);
    let mut worst = 0.0f64;
    let grid = cfg.grid.build()?;
    for k in 0..cfg.samples {
        let pieces = r.gen_range(4..64);
        let b = piecewise(grid, &mut r, pieces).add(&bumps(grid, &mut r, 3));
        let g = bumps(grid, &mut r, 4);
        let h = bumps(grid, &mut r, 4);
        let gap = duality_gap(&b, &g, &h, cfg.l, &ops)?;
        table.push(vec![1.0, cfg.l as f64, k as f64, gap]);
        worst = worst.max(gap);
    }
    let g2 = cfg.grid_2d.build()?;
    for k in 0..4 {
        let l = 1 + k % 2;
        let b = piecewise(g2, &mut r, 8).add(&bumps(g2, &mut r, 2));
        let g = bumps(g2, &mut r, 3);
        let h = bumps(g2, &mut r, 3);
        let gap = duality_gap(&b, &g, &h, l, &ops)?;
        table.push(vec![2.0, l as f64, k as f64, gap]);
        worst = worst.max(gap);
    }
    rep.push(MetricRow::at_most(12, "duality_pairing_rel_gap", worst, tol::DUALITY));
    rep.tables.push(table);
    Ok(())
}

/// Symbols for the commutator sweep; the first is the half-space step.
pub fn commutator_symbols(grid: Grid, seed: u64) -> Vec<(&'static str, GridFunction)> {
    let mut r = rng(seed);
    let step = GridFunction::from_fn(grid, |x| if x[0] > 0.0 { 1.0 } else { 0.0 });
    let cut = 0.75 * grid.half_width;
    let inside = |x: f64| x.abs() < cut;
    let log = GridFunction::from_fn(grid, |x| if inside(x[0]) { (x[0] - 3.0).abs().ln().max(-4.0) } else { 0.0 });
    let steplog = GridFunction::from_fn(grid, |x| {
        let s = if x[0] > 0.0 { 1.0 } else { 0.0 };
        s + if inside(x[0]) { ((x[0] - 3.0).abs() + 0.01).ln() } else { 0.0 }
    });
    let sin = GridFunction::from_fn(grid, |x| if inside(x[0]) { (2.0 * x[0]).sin() } else { 0.0 });
    let pc = piecewise(grid, &mut r, 64);
    vec![("step", step), ("log", log), ("step_log", steplog), ("sin", sin), ("piecewise", pc)]
}

pub fn run_commutator_bound(cfg: &ExperimentConfig, rep: &mut ExperimentReport) -> Result<(), LabCliError> {
    let ops = OperatorConfig::default();
    let grid = cfg.grid.build()?;
    let mut r = rng(cfg.seed);
    let fs: Vec<GridFunction> = (0..cfg.samples).map(|_| bumps(grid, &mut r, 5)).collect();
    let mut table = Table::new("commutator_bound", &["symbol", "sup_ratio", "bmo_neumann", "constant"]);
    let mut constants = vec![];
    for (k, (name, b)) in commutator_symbols(grid, cfg.seed).into_iter().enumerate() {
        let mut sup = 0.0f64;
        for f in &fs {
            sup = sup.max(norm(&commutator(&b, f, cfg.l, &ops)?, Norm::L2) / norm(f, Norm::L2));
        }
        let bn = bmo_norm(&b, BmoFlavor::Neumann)?;
        let c = sup / bn;
        table.push(vec![k as f64, sup, bn, if name == "step" { f64::NAN } else { c }]);
        if name == "step" {
            rep.push(MetricRow::at_most(12, "step_commutator_norm", sup, tol::STEP_COMMUTATOR));
            rep.push(MetricRow::at_most(12, "step_bmo_neumann", bn, tol::STEP_COMMUTATOR));
        } else {
            rep.fit(&format!("commutator_c_{name}"), c);
            constants.push(c);
        }
    }
    rep.push(MetricRow::at_most(12, "commutator_constant_spread", spread(&constants), tol::FIT_STABILITY));
    rep.fit("commutator_c", constants.iter().cloned().fold(0.0, f64::max));
    rep.tables.push(table);
    Ok(())
}

pub fn run_fs_synthesis(cfg: &ExperimentConfig, rep: &mut ExperimentReport) -> Result<(), LabCliError> {
    let ops = OperatorConfig::default();
    let grid = cfg.grid.build()?;
    let mut r = rng(cfg.seed);
    let mut table = Table::new("fs_synthesis", &["sample", "pieces", "bmo_neumann"]);
    let mut vals = vec![];
    for k in 0..cfg.samples {
        let pieces = r.gen_range(8..128);
        let tuple: Vec<GridFunction> = (0..=grid.dimension).map(|_| piecewise(grid, &mut r, pieces)).collect();
        let v = bmo_norm(&fs_synthesize(&tuple, &ops)?, BmoFlavor::Neumann)?;
        table.push(vec![k as f64, pieces as f64, v]);
        vals.push(v);
    }
    // fit on the first half, verify on the second
    let split = (vals.len() / 2).max(1);
    let c_fit = vals[..split].iter().cloned().fold(0.0, f64::max);
    let c_check = vals[split..].iter().cloned().fold(0.0, f64::max);
    rep.fit("fs_bmo_c", c_fit);
    rep.push(MetricRow::at_most(13, "fs_bmo_verify_over_fit", c_check / c_fit, tol::FIT_HEADROOM));
    let g2 = cfg.grid_2d.build()?;
    let tuple: Vec<GridFunction> = (0..3).map(|_| piecewise(g2, &mut r, 16)).collect();
    rep.push(MetricRow::info("fs_bmo_2d_sample", bmo_norm(&fs_synthesize(&tuple, &ops)?, BmoFlavor::Neumann)?));
    rep.tables.push(table);
    Ok(())
}
