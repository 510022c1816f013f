use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use neumann_lab::grid::write_atomic;

use crate::config::ExperimentConfig;
use crate::LabCliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Info,
}

/// How `value` is compared against `tolerance`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    AtMost,
    AtLeast,
    /// Pass/fail decided by a composite condition; `value` is the key statistic.
    Condition,
    None,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricRow {
    /// Acceptance criterion this row belongs to, if any.
    pub criterion: Option<u32>,
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub comparison: Comparison,
    pub verdict: Verdict,
}

impl MetricRow {
    pub fn at_most(criterion: u32, name: &str, value: f64, tolerance: f64) -> MetricRow {
        let ok = value <= tolerance;
        Self::with(criterion, name, value, tolerance, Comparison::AtMost, ok)
    }

    pub fn at_least(criterion: u32, name: &str, value: f64, tolerance: f64) -> MetricRow {
        let ok = value >= tolerance;
        Self::with(criterion, name, value, tolerance, Comparison::AtLeast, ok)
    }

    pub fn condition(criterion: u32, name: &str, value: f64, tolerance: f64, ok: bool) -> MetricRow {
        Self::with(criterion, name, value, tolerance, Comparison::Condition, ok && !value.is_nan())
    }

    pub fn info(name: &str, value: f64) -> MetricRow {
        MetricRow {
            criterion: None,
            name: name.to_string(),
            value,
            tolerance: f64::NAN,
            comparison: Comparison::None,
            verdict: Verdict::Info,
        }
    }

    fn with(criterion: u32, name: &str, value: f64, tolerance: f64, comparison: Comparison, ok: bool) -> MetricRow {
        MetricRow {
            criterion: Some(criterion),
            name: name.to_string(),
            value,
            tolerance,
            comparison,
            verdict: if ok { Verdict::Pass } else { Verdict::Fail },
        }
    }
}

impl fmt::Display for MetricRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let op = match self.comparison {
            Comparison::AtMost => "<=",
            Comparison::AtLeast => ">=",
            Comparison::Condition => "~",
            Comparison::None => "",
        };
        let v = match self.verdict {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Info => "info",
        };
        if self.comparison == Comparison::None {
            write!(f, "{v} {} = {:.6e}", self.name, self.value)
        } else if self.comparison == Comparison::Condition && !self.tolerance.is_finite() {
            write!(f, "{v} {} = {:.6e} (condition)", self.name, self.value)
        } else {
            write!(f, "{v} {} = {:.6e} ({op} {:.3e})", self.name, self.value, self.tolerance)
        }
    }
}

/// Named numeric table written as one CSV file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(name: &str, header: &[&str]) -> Table {
        Table { name: name.to_string(), header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Result<Vec<u8>, LabCliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r.iter().map(|v| format!("{v:e}")))?;
        }
        w.into_inner().map_err(|e| LabCliError::InvalidConfig(e.to_string()))
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub rows: Vec<MetricRow>,
    pub fitted: BTreeMap<String, f64>,
    #[serde(skip)]
    pub tables: Vec<Table>,
    pub wall_time_s: f64,
    pub version: String,
}

impl ExperimentReport {
    pub fn new(config: ExperimentConfig) -> ExperimentReport {
        ExperimentReport {
            config,
            rows: Vec::new(),
            fitted: BTreeMap::new(),
            tables: Vec::new(),
            wall_time_s: 0.0,
            version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }

    pub fn push(&mut self, row: MetricRow) {
        self.rows.push(row);
    }

    pub fn fit(&mut self, name: &str, value: f64) {
        self.fitted.insert(name.to_string(), value);
    }

    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.verdict != Verdict::Fail)
    }

    /// Rows of one acceptance criterion.
    pub fn criterion(&self, k: u32) -> Vec<&MetricRow> {
        self.rows.iter().filter(|r| r.criterion == Some(k)).collect()
    }

    /// Writes `report.json`, `metrics.csv` and one CSV per table into `dir`.
    pub fn write(&self, dir: &Path) -> Result<(), LabCliError> {
        std::fs::create_dir_all(dir)?;
        write_atomic(&dir.join("report.json"), serde_json::to_string_pretty(self)?.as_bytes())?;
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["criterion", "name", "value", "tolerance", "comparison", "verdict"])?;
        for r in &self.rows {
            w.write_record([
                r.criterion.map_or(String::new(), |c| c.to_string()),
                r.name.clone(),
                format!("{:e}", r.value),
                format!("{:e}", r.tolerance),
                format!("{:?}", r.comparison),
                format!("{:?}", r.verdict),
            ])?;
        }
        let bytes = w.into_inner().map_err(|e| LabCliError::InvalidConfig(e.to_string()))?;
        write_atomic(&dir.join("metrics.csv"), &bytes)?;
        for t in &self.tables {
            write_atomic(&dir.join(format!("{}.csv", t.name)), &t.to_csv()?)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdicts() {
        assert_eq!(MetricRow::at_most(1, "a", 1.0, 2.0).verdict, Verdict::Pass);
        assert_eq!(MetricRow::at_most(1, "a", f64::NAN, 2.0).verdict, Verdict::Fail);
        assert_eq!(MetricRow::at_least(1, "a", 1.0, 2.0).verdict, Verdict::Fail);
        assert_eq!(MetricRow::condition(1, "a", f64::NAN, 0.0, true).verdict, Verdict::Fail);
        assert_eq!(MetricRow::info("a", 3.0).verdict, Verdict::Info);
        let s = MetricRow::at_most(1, "gap", 1e-9, 1e-8).to_string();
        assert!(s.starts_with("PASS gap"));
    }

    #[test]
    fn table_csv() {
        let mut t = Table::new("t", &["x", "y"]);
        t.push(vec![1.0, 0.5]);
        let s = String::from_utf8(t.to_csv().unwrap()).unwrap();
        assert_eq!(s, "x,y\n1e0,5e-1\n");
    }
}
