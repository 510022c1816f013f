//! Semigroup, `Q` and Riesz reflection identities against the even extensions.

use neumann_lab::grid::{even_extension, norm, Norm};
use neumann_lab::operators::{apply_classical_riesz, apply_q, apply_riesz, apply_semigroup};
use neumann_lab::{Flavor, Grid, GridFunction, Half, OperatorConfig};

use super::rng;
use crate::config::ExperimentConfig;
use crate::inputs::bumps;
use crate::report::{ExperimentReport, MetricRow, Table};
use crate::tolerances as tol;
use crate::LabCliError;

/// Largest `|a − b|` over the samples of `half`.
fn half_gap(grid: &Grid, a: &GridFunction, b: &GridFunction, half: Half) -> f64 {
    (0..grid.len())
        .filter(|&i| grid.half_of(i) == half)
        .map(|i| (a.values[i] - b.values[i]).abs())
        .fold(0.0, f64::max)
}

fn half_l2(grid: &Grid, a: &GridFunction, half: Half) -> f64 {
    let s: f64 = (0..grid.len()).filter(|&i| grid.half_of(i) == half).map(|i| a.values[i].powi(2)).sum();
    (s * grid.cell_volume()).sqrt()
}

struct Gaps {
    heat: f64,
    q: f64,
    riesz: f64,
}

fn gaps(f: &GridFunction, heat_times: &[f64], cfg: &OperatorConfig) -> Result<Gaps, LabCliError> {
    let g = f.grid;
    let sup = norm(f, Norm::Linf).max(f64::MIN_POSITIVE);
    let ext = [(Half::Plus, even_extension(f, Half::Plus)), (Half::Minus, even_extension(f, Half::Minus))];
    let mut out = Gaps { heat: 0.0, q: 0.0, riesz: 0.0 };
    for &s in heat_times {
        let u = apply_semigroup(f, s, Flavor::Neumann)?;
        let v = apply_q(f, s.sqrt(), Flavor::Neumann)?;
        for (half, e) in &ext {
            let ue = apply_semigroup(e, s, Flavor::Classical)?;
            let ve = apply_q(e, s.sqrt(), Flavor::Classical)?;
            out.heat = out.heat.max(half_gap(&g, &u, &ue, *half) / sup);
            out.q = out.q.max(half_gap(&g, &v, &ve, *half) / sup);
        }
    }
    for l in 1..=g.dimension {
        let r = apply_riesz(f, l, false, cfg)?;
        for (half, e) in &ext {
            let re = apply_classical_riesz(e, l, false, cfg)?;
            let d = half_l2(&g, &r.sub(&re), *half) / half_l2(&g, &re, *half).max(f64::MIN_POSITIVE);
            out.riesz = out.riesz.max(d);
        }
    }
    Ok(out)
}

pub fn run(cfg: &ExperimentConfig, rep: &mut ExperimentReport) -> Result<(), LabCliError> {
    let grid = cfg.grid.build()?;
    let scales = cfg.scales.build(&grid)?;
    let ops = OperatorConfig::default();
    let mut r = rng(cfg.seed);
    let mut table = Table::new("reflection", &["dimension", "sample", "heat_gap", "q_gap", "riesz_rel_l2"]);
    let (mut heat, mut q, mut riesz) = (0.0f64, 0.0f64, 0.0f64);
    let times = scales.heat_times();
    for k in 0..cfg.samples {
        let f = bumps(grid, &mut r, 5);
        let gp = gaps(&f, &times, &ops)?;
        table.push(vec![1.0, k as f64, gp.heat, gp.q, gp.riesz]);
        heat = heat.max(gp.heat);
        q = q.max(gp.q);
        riesz = riesz.max(gp.riesz);
    }
    let g2 = cfg.grid_2d.build()?;
    let times2 = cfg.scales.build(&g2)?.heat_times();
    for k in 0..2 {
        let f = bumps(g2, &mut r, 4);
        let gp = gaps(&f, &times2, &ops)?;
        table.push(vec![2.0, k as f64, gp.heat, gp.q, gp.riesz]);
        heat = heat.max(gp.heat);
        q = q.max(gp.q);
        riesz = riesz.max(gp.riesz);
    }
    rep.push(MetricRow::at_most(1, "semigroup_reflection_gap", heat, tol::REFLECTION_HEAT));
    rep.push(MetricRow::at_most(1, "q_reflection_gap", q, tol::REFLECTION_HEAT));
    rep.push(MetricRow::at_most(1, "riesz_reflection_rel_l2", riesz, tol::REFLECTION_RIESZ));
    rep.tables.push(table);
    Ok(())
}
