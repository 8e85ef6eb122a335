//! Check records, CSV tables and the JSON run report.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;

pub const SCHEMA_VERSION: u32 = 1;

/// One comparison of a measured value against its oracle.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub oracle: f64,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub std_err: Option<f64>,
}

impl Check {
    /// Passes when `|measured − oracle| ≤ tolerance`.
    pub fn new(name: impl Into<String>, measured: f64, oracle: f64, tolerance: f64) -> Self {
        Check {
            name: name.into(),
            measured,
            oracle,
            tolerance,
            pass: (measured - oracle).abs() <= tolerance,
            std_err: None,
        }
    }

    /// Tolerance relative to the oracle.
    pub fn relative(name: impl Into<String>, measured: f64, oracle: f64, rel: f64) -> Self {
        Check::new(name, measured, oracle, rel * oracle.abs())
    }

    /// Stochastic estimate within `sigmas` standard errors.
    pub fn sigma(
        name: impl Into<String>,
        measured: f64,
        std_err: f64,
        oracle: f64,
        sigmas: f64,
    ) -> Self {
        Check::new(name, measured, oracle, sigmas * std_err).with_std_err(std_err)
    }

    /// Strict upper bound `measured < limit`, reported against oracle 0.
    pub fn below(name: impl Into<String>, measured: f64, limit: f64) -> Self {
        Check {
            name: name.into(),
            measured,
            oracle: 0.0,
            tolerance: limit,
            pass: measured.abs() < limit,
            std_err: None,
        }
    }

    pub fn with_std_err(mut self, std_err: f64) -> Self {
        self.std_err = Some(std_err);
        self
    }
}

/// Columnar data written as CSV next to the report.
#[derive(Debug, Clone)]
pub struct Table {
    pub name: &'static str,
    pub headers: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &'static str, headers: &[&'static str]) -> Self {
        Table {
            name,
            headers: headers.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: &[f64]) {
        self.rows.push(row.iter().map(|v| cell(*v)).collect());
    }

    pub fn push_cells(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }
}

/// Shortest round-trip decimal; empty for a missing value.
pub fn cell(v: f64) -> String {
    if v.is_nan() {
        String::new()
    } else {
        v.to_string()
    }
}

/// Result of one experiment before it is written out.
#[derive(Debug)]
pub struct Outcome {
    pub relation: &'static str,
    pub checks: Vec<Check>,
    pub tables: Vec<Table>,
}

impl Outcome {
    pub fn new(relation: &'static str) -> Self {
        Outcome {
            relation,
            checks: Vec::new(),
            tables: Vec::new(),
        }
    }

    pub fn check(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn table(&mut self, t: Table) {
        self.tables.push(t);
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Diagnostic {
    pub kind: &'static str,
    pub message: String,
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub subcommand: &'static str,
    pub relation: &'static str,
    pub config: Value,
    pub pass: bool,
    pub checks: Vec<Check>,
    pub tables: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagnostic: Option<Diagnostic>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub duration_seconds: Option<f64>,
}

#[derive(Debug, thiserror::Error)]
pub enum WriteError {
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Csv { path: PathBuf, source: csv::Error },
    #[error("cannot serialize report: {0}")]
    Json(#[from] serde_json::Error),
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> WriteError + '_ {
    move |source| WriteError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn write_table(dir: &Path, sub: &str, t: &Table) -> Result<String, WriteError> {
    let file = format!("{sub}_{}.csv", t.name);
    let path = dir.join(&file);
    let csv_err = |source| WriteError::Csv {
        path: path.clone(),
        source,
    };
    let mut w = csv::Writer::from_path(&path).map_err(csv_err)?;
    w.write_record(&t.headers).map_err(csv_err)?;
    for r in &t.rows {
        w.write_record(r).map_err(csv_err)?;
    }
    w.flush().map_err(io_err(&path))?;
    Ok(file)
}

/// Writes `<sub>.json` and one CSV per table into `dir`; returns the JSON.
pub fn write(dir: &Path, mut report: Report, tables: &[Table]) -> Result<String, WriteError> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    for t in tables {
        let file = write_table(dir, report.subcommand, t)?;
        report.tables.push(file);
    }
    let json = serde_json::to_string_pretty(&report)?;
    let path = dir.join(format!("{}.json", report.subcommand));
    fs::write(&path, format!("{json}\n")).map_err(io_err(&path))?;
    Ok(json)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn check_constructors() {
        assert!(Check::new("a", 1.0, 1.05, 0.1).pass);
        assert!(!Check::relative("b", 1.2, 1.0, 0.1).pass);
        let s = Check::sigma("c", 0.3, 0.1, 0.0, 3.0);
        assert!(s.pass && s.std_err == Some(0.1));
        assert!(!Check::below("d", 0.5, 0.5).pass);
        assert!(!Check::new("e", f64::NAN, 0.0, 1.0).pass);
    }

    #[test]
    fn cells_round_trip() {
        assert_eq!(cell(3.0), "3");
        assert_eq!(cell(f64::NAN), "");
        let x = 0.1 + 0.2;
        assert_eq!(cell(x).parse::<f64>().unwrap(), x);
    }
}
