//! Hardy-space characterizations, BMO inclusion and the counterexample sweep.

use neumann_lab::atoms::counterexample_function;
use neumann_lab::functionals::{
    area_function, bmo_norm, h1_norm, nontangential_maximal, radial_maximal, BmoFlavor, Characterization, ScaleGrid,
};
use neumann_lab::grid::{even_extension, norm, Norm};
use neumann_lab::{Flavor, Grid, GridFunction, Half, OperatorConfig};

use super::{rng, spread};
use crate::config::ExperimentConfig;
use crate::inputs::mean_zero_bumps;
use crate::report::{ExperimentReport, MetricRow, Table};
use crate::tolerances as tol;
use crate::LabCliError;

fn extensions(f: &GridFunction) -> [GridFunction; 2] {
    [even_extension(f, Half::Plus), even_extension(f, Half::Minus)]
}

struct AreaCheck {
    identity: f64,
    upper_violations: usize,
    lower_violations: usize,
    l1_ratio: f64,
}

/// Pointwise `S_N² = ½(S₊² + S₋²)` and the two pointwise sandwiches.
fn area_check(f: &GridFunction, scales: &ScaleGrid) -> Result<AreaCheck, LabCliError> {
    let sn = area_function(f, Flavor::Neumann, scales)?;
    let [ep, em] = extensions(f);
    let sp = area_function(&ep, Flavor::Classical, scales)?;
    let sm = area_function(&em, Flavor::Classical, scales)?;
    let mut out = AreaCheck { identity: 0.0, upper_violations: 0, lower_violations: 0, l1_ratio: 0.0 };
    let half = std::f64::consts::FRAC_1_SQRT_2;
    for i in 0..sn.values.len() {
        let (a, p, m) = (sn.values[i], sp.values[i], sm.values[i]);
        if a > tol::AREA_FLOOR {
            let rhs = 0.5 * (p * p + m * m);
            out.identity = out.identity.max((a * a - rhs).abs() / (a * a));
        }
        if a > half * (p + m) * (1.0 + 1e-12) {
            out.upper_violations += 1;
        }
        if p + m > 2.0 * std::f64::consts::SQRT_2 * a * (1.0 + 1e-12) {
            out.lower_violations += 1;
        }
    }
    out.l1_ratio = norm(&sn, Norm::L1) / (norm(&sp, Norm::L1) + norm(&sm, Norm::L1));
    Ok(out)
}

pub fn run_equivalence(cfg: &ExperimentConfig, rep: &mut ExperimentReport) -> Result<(), LabCliError> {
    let grid = cfg.grid.build()?;
    let scales = cfg.scales.build(&grid)?;
    let ops = OperatorConfig::default();
    let mut r = rng(cfg.seed);
    let mut table = Table::new(
        "norm_equivalence",
        &["sample", "max_neumann", "max_via_extensions", "rel_gap", "area", "nontangential", "riesz", "area_identity_err"],
    );
    let mut half_gap = 0.0f64;
    let (mut area_err, mut up, mut low) = (0.0f64, 0usize, 0usize);
    let (mut ratios_area, mut ratios_nt, mut ratios_riesz, mut l1_ratios) = (vec![], vec![], vec![], vec![]);
    let (mut nt_upper, mut nt_lower) = (0.0f64, 0.0f64);
    for k in 0..cfg.samples {
        let f = mean_zero_bumps(grid, &mut r, 5);
        let mx = h1_norm(&f, Characterization::Max, Flavor::Neumann, &scales, &ops)?;
        let [ep, em] = extensions(&f);
        let via = 0.5
            * (norm(&radial_maximal(&ep, Flavor::Classical, &scales)?, Norm::L1)
                + norm(&radial_maximal(&em, Flavor::Classical, &scales)?, Norm::L1));
        let gap = (mx - via).abs() / via;
        half_gap = half_gap.max(gap);

        let ar = h1_norm(&f, Characterization::Area, Flavor::Neumann, &scales, &ops)?;
        let ntn = nontangential_maximal(&f, Flavor::Neumann, &scales)?;
        let nt = norm(&ntn, Norm::L1);
        let rz = h1_norm(&f, Characterization::Riesz, Flavor::Neumann, &scales, &ops)?;
        ratios_area.push(ar / mx);
        ratios_nt.push(nt / mx);
        ratios_riesz.push(rz / mx);
        let ntp = norm(&nontangential_maximal(&ep, Flavor::Classical, &scales)?, Norm::L1);
        let ntm = norm(&nontangential_maximal(&em, Flavor::Classical, &scales)?, Norm::L1);
        nt_upper = nt_upper.max(nt / (ntp + ntm));
        nt_lower = nt_lower.max(ntp.max(ntm) / nt);

        let ac = area_check(&f, &scales)?;
        area_err = area_err.max(ac.identity);
        up += ac.upper_violations;
        low += ac.lower_violations;
        l1_ratios.push(ac.l1_ratio);
        table.push(vec![k as f64, mx, via, gap, ar, nt, rz, ac.identity]);
    }
    rep.push(MetricRow::at_most(2, "max_half_identity_rel_gap", half_gap, tol::HALF_IDENTITY));
    rep.push(MetricRow::at_most(3, "area_pointwise_identity_rel_err", area_err, tol::AREA_IDENTITY));
    rep.push(MetricRow::at_most(3, "area_upper_sandwich_violations", up as f64, 0.0));
    rep.push(MetricRow::at_most(3, "area_lower_sandwich_violations", low as f64, 0.0));

    // even functions: both extensions coincide with f
    let mut sym_err = 0.0f64;
    for _ in 0..2 {
        let f = even_extension(&mean_zero_bumps(grid, &mut r, 5), Half::Plus);
        sym_err = sym_err.max(area_check(&f, &scales)?.identity);
    }
    rep.push(MetricRow::info("area_identity_rel_err_even_functions", sym_err));
    for (name, v) in [("area_over_max", &ratios_area), ("nontangential_over_max", &ratios_nt), ("riesz_over_max", &ratios_riesz)] {
        rep.fit(&format!("{name}_min"), v.iter().cloned().fold(f64::INFINITY, f64::min));
        rep.fit(&format!("{name}_max"), v.iter().cloned().fold(0.0, f64::max));
    }
    rep.push(MetricRow::info("area_l1_ratio_min", l1_ratios.iter().cloned().fold(f64::INFINITY, f64::min)));
    rep.push(MetricRow::info("area_l1_ratio_max", l1_ratios.iter().cloned().fold(0.0, f64::max)));
    rep.push(MetricRow::info("nontangential_l1_upper_ratio_max", nt_upper));
    rep.push(MetricRow::info("nontangential_l1_lower_ratio_max", nt_lower));
    rep.tables.push(table);
    Ok(())
}

pub fn run_bmo_inclusion(cfg: &ExperimentConfig, rep: &mut ExperimentReport) -> Result<(), LabCliError> {
    let mut table = Table::new("bmo_step", &["dimension", "neumann", "classical", "even_plus", "even_minus"]);
    for (k, spec) in [cfg.grid, cfg.grid_2d].iter().enumerate() {
        let grid = spec.build()?;
        let n = grid.dimension;
        let step = GridFunction::from_fn(grid, |x| if x[n - 1] > 0.0 { 1.0 } else { 0.0 });
        let bn = bmo_norm(&step, BmoFlavor::Neumann)?;
        let bc = bmo_norm(&step, BmoFlavor::Classical)?;
        let bp = bmo_norm(&step, BmoFlavor::EvenPlus)?;
        let bm = bmo_norm(&step, BmoFlavor::EvenMinus)?;
        table.push(vec![n as f64, bn, bc, bp, bm]);
        let tag = if k == 0 { "" } else { "_2d" };
        rep.push(MetricRow::at_most(7, &format!("step_bmo_neumann{tag}"), bn, tol::STEP_BMO_NEUMANN));
        rep.push(MetricRow::at_least(7, &format!("step_bmo_classical{tag}"), bc, tol::STEP_BMO_CLASSICAL));
    }
    rep.tables.push(table);
    Ok(())
}

pub fn run_counterexample(cfg: &ExperimentConfig, rep: &mut ExperimentReport) -> Result<(), LabCliError> {
    let h = cfg.grid.build()?.spacing();
    let ops = OperatorConfig::default();
    let mut table = Table::new("counterexample", &["L", "N", "classical_max", "neumann_max", "neumann_via_extensions"]);
    let (mut ls, mut classical, mut neumann) = (vec![], vec![], vec![]);
    let mut ext_gap = 0.0f64;
    for &l in &cfg.box_sizes {
        let n = (2.0 * l / h).round() as usize;
        let grid = Grid::new(1, l, n)?;
        let scales = ScaleGrid::for_grid(&grid, cfg.scales.count);
        let f = counterexample_function(grid)?;
        let c = norm(&radial_maximal(&f, Flavor::Classical, &scales)?, Norm::L1);
        let nm = h1_norm(&f, Characterization::Max, Flavor::Neumann, &scales, &ops)?;
        let [ep, em] = extensions(&f);
        let via = 0.5
            * (norm(&radial_maximal(&ep, Flavor::Classical, &scales)?, Norm::L1)
                + norm(&radial_maximal(&em, Flavor::Classical, &scales)?, Norm::L1));
        ext_gap = ext_gap.max((nm - via).abs() / via);
        table.push(vec![l, n as f64, c, nm, via]);
        ls.push(l);
        classical.push(c);
        neumann.push(via);
    }
    let k = ls.len();
    let plateau = (classical[k - 1] - classical[k - 2]).abs() / classical[k - 2];
    rep.push(MetricRow::at_most(7, "counterexample_classical_change_last_doubling", plateau, tol::COUNTEREXAMPLE_PLATEAU));
    let slopes: Vec<f64> = (1..k).map(|i| (neumann[i] - neumann[i - 1]) / (ls[i] / ls[i - 1]).ln()).collect();
    let positive = slopes.iter().all(|s| *s > 0.0);
    let sp = spread(&slopes) - 1.0;
    rep.push(MetricRow::condition(
        7,
        "counterexample_neumann_slope_spread",
        sp,
        tol::COUNTEREXAMPLE_SLOPE_SPREAD,
        positive && sp <= tol::COUNTEREXAMPLE_SLOPE_SPREAD,
    ));
    let mut st = Table::new("counterexample_slopes", &["L_from", "L_to", "slope"]);
    for i in 1..k {
        st.push(vec![ls[i - 1], ls[i], slopes[i - 1]]);
    }
    rep.fit("counterexample_log_slope_mean", slopes.iter().sum::<f64>() / slopes.len() as f64);
    rep.push(MetricRow::info("counterexample_neumann_vs_extensions_gap", ext_gap));
    rep.tables.push(table);
    rep.tables.push(st);
    Ok(())
}
