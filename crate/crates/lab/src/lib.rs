//! Experiment runner for `neumann_lab`: named, config-driven experiments that
//! check identities and bounds and emit `report.json` plus CSV tables.

pub mod config;
mod experiments;
pub mod inputs;
pub mod report;
pub mod tolerances;

use std::path::Path;
use std::time::Instant;

pub use config::ExperimentConfig;
pub use report::{ExperimentReport, MetricRow, Verdict};

#[derive(Debug, thiserror::Error)]
pub enum LabCliError {
    #[error("unknown experiment {0:?}; run `lab list` for the registered names")]
    UnknownExperiment(String),
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Lab(#[from] neumann_lab::LabError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

const EXPERIMENTS: [&str; 12] = [
    "bmo-inclusion",
    "commutator-bound",
    "counterexample",
    "duality-pairing",
    "factorize-atom",
    "fs-synthesis",
    "kernel-identities",
    "norm-equivalence",
    "reflection-identities",
    "riesz-mass",
    "two-bump",
    "weak-factorize",
];

/// Registered experiment names, sorted.
pub fn list_experiments() -> Vec<&'static str> {
    EXPERIMENTS.to_vec()
}

/// Runs one experiment. Nothing is written; see [`ExperimentReport::write`].
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport, LabCliError> {
    config.validate()?;
    let start = Instant::now();
    let mut rep = ExperimentReport::new(config.clone());
    let run = match config.experiment.as_str() {
        "kernel-identities" => experiments::kernel::run,
        "reflection-identities" => experiments::reflection::run,
        "norm-equivalence" => experiments::norms::run_equivalence,
        "bmo-inclusion" => experiments::norms::run_bmo_inclusion,
        "counterexample" => experiments::norms::run_counterexample,
        "two-bump" => experiments::factor::run_two_bump,
        "riesz-mass" => experiments::factor::run_riesz_mass,
        "factorize-atom" => experiments::factor::run_factorize_atom,
        "weak-factorize" => experiments::factor::run_weak_factorize,
        "duality-pairing" => experiments::commutator::run_duality,
        "commutator-bound" => experiments::commutator::run_commutator_bound,
        "fs-synthesis" => experiments::commutator::run_fs_synthesis,
        other => return Err(LabCliError::UnknownExperiment(other.to_string())),
    };
    run(config, &mut rep)?;
    rep.wall_time_s = start.elapsed().as_secs_f64();
    Ok(rep)
}

/// Runs an experiment and writes its outputs into `dir`.
pub fn run_to_dir(config: &ExperimentConfig, dir: &Path) -> Result<ExperimentReport, LabCliError> {
    let rep = run_experiment(config)?;
    rep.write(dir)?;
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_sorted_and_complete() {
        let names = list_experiments();
        assert_eq!(names.len(), 12);
        let mut sorted = names.clone();
        sorted.sort();
        assert_eq!(names, sorted);
    }

    #[test]
    fn unknown_name_writes_nothing() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("out");
        let mut cfg = ExperimentConfig::default_for("riesz-mass").unwrap();
        cfg.experiment = "unknown-name".into();
        assert!(matches!(run_to_dir(&cfg, &out), Err(LabCliError::UnknownExperiment(_))));
        assert!(!out.exists());
    }
}
