use std::fmt::{self, Write as _};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::Confusion;
use crate::{Error, Result};

pub const REPORT_CSV_HEADER: &str = "n_train,n_test,architecture,efficiency_pct,final_sse,epochs";

/// One grid cell. Requested and actual split sizes are both kept.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRow {
    pub requested_train: usize,
    pub requested_test: usize,
    pub n_train: usize,
    pub n_test: usize,
    pub rescaled: bool,
    pub architecture: String,
    pub layer_sizes: Vec<usize>,
    pub efficiency: f64,
    pub binary_efficiency: f64,
    /// Efficiency of always predicting the training set's majority class.
    pub baseline_efficiency: f64,
    pub final_sse: f64,
    pub epochs: usize,
    pub rejected_epochs: usize,
    pub confusion: Confusion,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub rows: Vec<ExperimentRow>,
    pub instance_count: usize,
    pub imputation: String,
    pub seed: u64,
    pub substitutions: Vec<String>,
}

impl ExperimentReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(REPORT_CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{:?},{:?},{}",
                r.n_train, r.n_test, r.architecture, r.efficiency, r.final_sse, r.epochs
            );
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

impl fmt::Display for ExperimentReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "instances: {}  imputation: {}  seed: {}",
            self.instance_count, self.imputation, self.seed
        )?;
        for note in &self.substitutions {
            writeln!(f, "note: {note}")?;
        }
        writeln!(
            f,
            "{:>9} {:>9} {:>7} {:>7} {:>12} {:>10} {:>9} {:>10} {:>7}",
            "requested",
            "actual",
            "arch",
            "eff%",
            "normal/abn%",
            "baseline%",
            "final_sse",
            "epochs",
            "reject"
        )?;
        for r in &self.rows {
            writeln!(
                f,
                "{:>9} {:>9} {:>7} {:>7.2} {:>12.2} {:>10.2} {:>9.4} {:>10} {:>7}",
                format!("{}/{}", r.requested_train, r.requested_test),
                format!("{}/{}", r.n_train, r.n_test),
                r.architecture,
                r.efficiency,
                r.binary_efficiency,
                r.baseline_efficiency,
                r.final_sse,
                r.epochs,
                r.rejected_epochs,
            )?;
        }
        Ok(())
    }
}

/// Writes the report as CSV with [`REPORT_CSV_HEADER`].
pub fn export_report(report: &ExperimentReport, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, report.to_csv()).map_err(|e| Error::io(path, e))
}

/// A row as read back from an exported CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportCsvRow {
    pub n_train: usize,
    pub n_test: usize,
    pub architecture: String,
    pub efficiency_pct: f64,
    pub final_sse: f64,
    pub epochs: usize,
}

impl From<&ExperimentRow> for ReportCsvRow {
    fn from(r: &ExperimentRow) -> Self {
        ReportCsvRow {
            n_train: r.n_train,
            n_test: r.n_test,
            architecture: r.architecture.clone(),
            efficiency_pct: r.efficiency,
            final_sse: r.final_sse,
            epochs: r.epochs,
        }
    }
}

pub fn load_report_csv(path: impl AsRef<Path>) -> Result<Vec<ReportCsvRow>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut lines = text.lines();
    if lines.next().map(str::trim) != Some(REPORT_CSV_HEADER) {
        return Err(Error::Format(format!(
            "{}: expected header {REPORT_CSV_HEADER:?}",
            path.display()
        )));
    }
    let mut rows = Vec::new();
    for (idx, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let bad = || Error::Parse {
            line: idx + 2,
            message: format!("malformed report row {line:?}"),
        };
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 6 {
            return Err(bad());
        }
        rows.push(ReportCsvRow {
            n_train: f[0].parse().map_err(|_| bad())?,
            n_test: f[1].parse().map_err(|_| bad())?,
            architecture: f[2].to_string(),
            efficiency_pct: f[3].parse().map_err(|_| bad())?,
            final_sse: f[4].parse().map_err(|_| bad())?,
            epochs: f[5].parse().map_err(|_| bad())?,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(arch: &str, eff: f64) -> ExperimentRow {
        ExperimentRow {
            requested_train: 350,
            requested_test: 100,
            n_train: 235,
            n_test: 67,
            rescaled: true,
            architecture: arch.into(),
            layer_sizes: vec![13, 2],
            efficiency: eff,
            binary_efficiency: 80.0,
            baseline_efficiency: 50.0,
            final_sse: 12.345678901234567,
            epochs: 5000,
            rejected_epochs: 3,
            confusion: [[0; 4]; 4],
        }
    }

    fn report(rows: Vec<ExperimentRow>) -> ExperimentReport {
        ExperimentReport {
            rows,
            instance_count: 303,
            imputation: "median".into(),
            seed: 0,
            substitutions: vec![],
        }
    }

    #[test]
    fn two_rows_make_three_lines_and_reload_exactly() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("report.csv");
        let rep = report(vec![
            row("single", 100.0 / 3.0),
            row("multi", 61.19402985074627),
        ]);
        export_report(&rep, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().count(), 3);
        assert_eq!(text.lines().next(), Some(REPORT_CSV_HEADER));
        let back = load_report_csv(&path).unwrap();
        let expected: Vec<ReportCsvRow> = rep.rows.iter().map(ReportCsvRow::from).collect();
        assert_eq!(back, expected);
    }

    #[test]
    fn empty_report_is_header_only() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("empty.csv");
        export_report(&report(vec![]), &path).unwrap();
        assert_eq!(
            std::fs::read_to_string(&path).unwrap(),
            format!("{REPORT_CSV_HEADER}\n")
        );
        assert!(load_report_csv(&path).unwrap().is_empty());
    }

    #[test]
    fn export_error_names_path() {
        let err = export_report(&report(vec![]), "/nonexistent-dir/x/report.csv").unwrap_err();
        assert!(err.to_string().contains("/nonexistent-dir/x/report.csv"));
        assert_eq!(err.exit_code(), 5);
    }
}
