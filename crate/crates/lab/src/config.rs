use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use neumann_lab::functionals::ScaleGrid;
use neumann_lab::Grid;

use crate::LabCliError;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub dimension: usize,
    #[serde(rename = "L")]
    pub half_width: f64,
    #[serde(rename = "N")]
    pub points: usize,
}

impl GridSpec {
    pub fn build(&self) -> Result<Grid, LabCliError> {
        Ok(Grid::new(self.dimension, self.half_width, self.points)?)
    }
}

/// Scale range in `t` (heat time `t²`). Missing ends default to the full range.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScaleSpec {
    pub t_min: Option<f64>,
    pub t_max: Option<f64>,
    pub count: usize,
}

impl Default for ScaleSpec {
    fn default() -> Self {
        ScaleSpec { t_min: None, t_max: None, count: ScaleGrid::DEFAULT_COUNT }
    }
}

impl ScaleSpec {
    pub fn build(&self, grid: &Grid) -> Result<ScaleGrid, LabCliError> {
        let full = ScaleGrid::for_grid(grid, self.count);
        let lo = self.t_min.map_or(full.s_min, |t| t * t);
        let hi = self.t_max.map_or(full.s_max, |t| t * t);
        Ok(ScaleGrid::new(grid, lo, hi, self.count)?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub experiment: String,
    pub grid: GridSpec,
    pub scales: ScaleSpec,
    /// Secondary grid for two-dimensional spot checks.
    pub grid_2d: GridSpec,
    pub seed: u64,
    /// Number of random inputs (or sampled points) where applicable.
    pub samples: usize,
    pub m_list: Vec<f64>,
    pub epsilons: Vec<f64>,
    pub l: usize,
    pub k_max: usize,
    /// Box half-widths for the counterexample sweep.
    pub box_sizes: Vec<f64>,
    pub output: Option<PathBuf>,
}

impl ExperimentConfig {
    /// Shipped defaults for a registered experiment.
    pub fn default_for(name: &str) -> Result<ExperimentConfig, LabCliError> {
        if !crate::list_experiments().contains(&name) {
            return Err(LabCliError::UnknownExperiment(name.to_string()));
        }
        let mut c = ExperimentConfig {
            experiment: name.to_string(),
            grid: GridSpec { dimension: 1, half_width: 16.0, points: 4096 },
            scales: ScaleSpec::default(),
            grid_2d: GridSpec { dimension: 2, half_width: 8.0, points: 64 },
            seed: 20240601,
            samples: 20,
            m_list: vec![16.0, 64.0, 256.0],
            epsilons: vec![0.5, 0.25, 0.1],
            l: 1,
            k_max: 6,
            box_sizes: vec![4.0, 8.0, 16.0, 32.0],
            output: None,
        };
        match name {
            "kernel-identities" => c.samples = 100_000,
            "norm-equivalence" => c.samples = 10,
            "bmo-inclusion" => c.samples = 1,
            "duality-pairing" => c.samples = 50,
            "commutator-bound" => c.samples = 50,
            "weak-factorize" => c.samples = 5,
            _ => {}
        }
        Ok(c)
    }

    /// Defaults for `name`, overridden key by key by a JSON file.
    pub fn load(name: &str, path: Option<&Path>) -> Result<ExperimentConfig, LabCliError> {
        let base = ExperimentConfig::default_for(name)?;
        let Some(path) = path else { return Ok(base) };
        let text = std::fs::read_to_string(path)?;
        let over: Value = serde_json::from_str(&text)?;
        let mut merged = serde_json::to_value(&base)?;
        merge(&mut merged, over);
        let cfg: ExperimentConfig = serde_json::from_value(merged)?;
        if cfg.experiment != name {
            return Err(LabCliError::InvalidConfig(format!(
                "config names experiment {:?} but {name:?} was requested",
                cfg.experiment
            )));
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), LabCliError> {
        if !crate::list_experiments().contains(&self.experiment.as_str()) {
            return Err(LabCliError::UnknownExperiment(self.experiment.clone()));
        }
        self.grid.build()?;
        self.grid_2d.build()?;
        if self.grid_2d.dimension != 2 {
            return Err(LabCliError::InvalidConfig("grid_2d must be two-dimensional".into()));
        }
        self.scales.build(&self.grid.build()?)?;
        if self.samples == 0 {
            return Err(LabCliError::InvalidConfig("samples must be positive".into()));
        }
        if self.epsilons.iter().any(|e| !(*e > 0.0)) {
            return Err(LabCliError::InvalidConfig("epsilons must be positive".into()));
        }
        if self.m_list.iter().any(|m| !(*m > 10.0)) {
            return Err(LabCliError::InvalidConfig("every M must exceed 10".into()));
        }
        if !(1..=self.grid.dimension).contains(&self.l) {
            return Err(LabCliError::InvalidConfig(format!("axis l = {} out of range", self.l)));
        }
        Ok(())
    }
}

fn merge(base: &mut Value, over: Value) {
    match (base, over) {
        (Value::Object(b), Value::Object(o)) => {
            for (k, v) in o {
                match b.get_mut(&k) {
                    Some(slot) => merge(slot, v),
                    None => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (slot, v) => *slot = v,
    }
}
