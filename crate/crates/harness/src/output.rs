use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::error::{HarnessError, HarnessResult};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundValue {
    pub value: f64,
    /// The formula that produced `value`.
    pub formula: String,
}

/// One output record. Maps are ordered, so serialization is deterministic.
/// Wall-clock time is not part of a row.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub experiment: String,
    pub row: u64,
    pub config: serde_json::Value,
    pub labels: BTreeMap<String, String>,
    pub measured: BTreeMap<String, f64>,
    pub bounds: BTreeMap<String, BoundValue>,
    pub checks: BTreeMap<String, bool>,
    pub version: String,
}

const PROB_TOL: f64 = 1e-12;

impl ResultRow {
    pub fn new(cfg: &ExperimentConfig, row: u64) -> Self {
        Self {
            experiment: cfg.experiment.clone(),
            row,
            config: cfg.echo(),
            labels: BTreeMap::new(),
            measured: BTreeMap::new(),
            bounds: BTreeMap::new(),
            checks: BTreeMap::new(),
            version: crate::version(),
        }
    }

    pub fn label(mut self, key: &str, value: impl ToString) -> Self {
        self.labels.insert(key.into(), value.to_string());
        self
    }

    pub fn value(mut self, key: &str, value: f64) -> Self {
        self.measured.insert(key.into(), value);
        self
    }

    /// A measured probability; records the check `<key>_in_unit_interval`.
    pub fn prob(mut self, key: &str, p: f64) -> Self {
        self.checks
            .insert(format!("{key}_in_unit_interval"), (-PROB_TOL..=1.0 + PROB_TOL).contains(&p));
        self.measured.insert(key.into(), p);
        self
    }

    pub fn bound(mut self, key: &str, value: f64, formula: &str) -> Self {
        self.bounds.insert(
            key.into(),
            BoundValue {
                value,
                formula: formula.into(),
            },
        );
        self
    }

    pub fn check(mut self, key: &str, ok: bool) -> Self {
        self.checks.insert(key.into(), ok);
        self
    }

    pub fn failed_checks(&self) -> Vec<&str> {
        self.checks.iter().filter(|(_, ok)| !**ok).map(|(k, _)| k.as_str()).collect()
    }

    /// Looks a column up by name: `experiment`, `row`, or a key of
    /// `measured`, `labels`, `bounds` or `checks` (searched in that order),
    /// optionally qualified as `measured.key` etc.
    pub fn column(&self, name: &str) -> Option<String> {
        let (section, key) = match name.split_once('.') {
            Some((s, k)) if ["measured", "labels", "bounds", "checks"].contains(&s) => (Some(s), k),
            _ => (None, name),
        };
        match (section, key) {
            (None, "experiment") => return Some(self.experiment.clone()),
            (None, "row") => return Some(self.row.to_string()),
            _ => {}
        }
        let want = |s: &str| section.is_none() || section == Some(s);
        if want("measured") {
            if let Some(v) = self.measured.get(key) {
                return Some(format_f64(*v));
            }
        }
        if want("labels") {
            if let Some(v) = self.labels.get(key) {
                return Some(v.clone());
            }
        }
        if want("bounds") {
            if let Some(v) = self.bounds.get(key) {
                return Some(format_f64(v.value));
            }
        }
        if want("checks") {
            if let Some(v) = self.checks.get(key) {
                return Some(v.to_string());
            }
        }
        None
    }

    fn column_names(&self) -> Vec<String> {
        let mut out = vec!["experiment".to_string(), "row".to_string()];
        out.extend(self.measured.keys().map(|k| format!("measured.{k}")));
        out.extend(self.labels.keys().map(|k| format!("labels.{k}")));
        out.extend(self.bounds.keys().map(|k| format!("bounds.{k}")));
        out.extend(self.checks.keys().map(|k| format!("checks.{k}")));
        out
    }
}

/// Shortest decimal that parses back to the same `f64`, '.' separator.
pub fn format_f64(v: f64) -> String {
    format!("{v:?}")
}

/// One JSON object per line.
pub fn write_jsonl(rows: &[ResultRow], mut out: impl Write) -> HarnessResult<()> {
    for r in rows {
        let line = serde_json::to_string(r).map_err(|e| HarnessError::Runtime(e.to_string()))?;
        out.write_all(line.as_bytes())?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub fn jsonl_bytes(rows: &[ResultRow]) -> HarnessResult<Vec<u8>> {
    let mut buf = Vec::new();
    write_jsonl(rows, &mut buf)?;
    Ok(buf)
}

/// CSV with a header and the given columns in order, LF line endings.
pub fn plot_data_bytes(rows: &[ResultRow], columns: &[String]) -> HarnessResult<Vec<u8>> {
    let mut table = Vec::with_capacity(rows.len());
    for r in rows {
        let mut line = Vec::with_capacity(columns.len());
        for c in columns {
            match r.column(c) {
                Some(v) => line.push(v),
                None => {
                    return Err(HarnessError::Config(format!(
                        "column {c:?} not found in row {}; available: {}",
                        r.row,
                        r.column_names().join(", ")
                    )))
                }
            }
        }
        table.push(line);
    }
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let csv_err = |e: csv::Error| HarnessError::Runtime(e.to_string());
    w.write_record(columns).map_err(csv_err)?;
    for line in &table {
        w.write_record(line).map_err(csv_err)?;
    }
    w.into_inner().map_err(|e| HarnessError::Runtime(e.to_string()))
}

pub fn emit_plot_data(rows: &[ResultRow], columns: &[String], path: &Path) -> HarnessResult<()> {
    let bytes = plot_data_bytes(rows, columns)?;
    std::fs::write(path, bytes)?;
    Ok(())
}
