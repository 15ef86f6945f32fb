//! Experiment results and their on-disk form.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde_json::{Map, Value};

use crate::spec::ExperimentSpec;
use crate::HarnessError;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// One grid point of an averaged curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridRow {
    pub x: f64,
    pub mean: f64,
    pub std_err: f64,
    pub replicas: usize,
    pub target: Option<f64>,
}

/// A statistic compared against a closed tolerance interval.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
    pub passed: bool,
}

impl Check {
    pub fn within(name: impl Into<String>, value: f64, lower: f64, upper: f64) -> Self {
        let passed = value >= lower && value <= upper;
        Self { name: name.into(), value, lower, upper, passed }
    }

    pub fn at_most(name: impl Into<String>, value: f64, upper: f64) -> Self {
        Self::within(name, value, f64::NEG_INFINITY, upper)
    }

    pub fn at_least(name: impl Into<String>, value: f64, lower: f64) -> Self {
        Self::within(name, value, lower, f64::INFINITY)
    }

    pub fn around(name: impl Into<String>, value: f64, target: f64, tolerance: f64) -> Self {
        Self::within(name, value, target - tolerance, target + tolerance)
    }

    /// `slope = -1.012300 in [-1.100000, -0.900000]`.
    pub fn describe(&self) -> String {
        let bound = |b: f64| if b.is_finite() { format!("{b:.6}") } else { String::from(if b > 0.0 { "inf" } else { "-inf" }) };
        format!("{} = {:.6} in [{}, {}]", self.name, self.value, bound(self.lower), bound(self.upper))
    }

    /// [`Check::describe`] prefixed with `[PASS]` or `[FAIL]`.
    pub fn line(&self) -> String {
        format!("[{}] {}", if self.passed { "PASS" } else { "FAIL" }, self.describe())
    }
}

/// A numeric table written as CSV.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DataTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl DataTable {
    pub fn new(header: &[&str]) -> Self {
        Self { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    /// Shortest round-trip formatting, so reruns are byte-identical.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{}", self.header.join(","))?;
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            writeln!(out, "{}", cells.join(","))?;
        }
        out.flush()
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSummary {
    pub spec: ExperimentSpec,
    pub rows: Vec<GridRow>,
    pub stats: Vec<(String, f64)>,
    pub checks: Vec<Check>,
    /// Written to `<prefix>.data.csv`.
    pub data: DataTable,
    /// Written to `<prefix>.<name>.csv`.
    pub extra: Vec<(String, DataTable)>,
}

impl ExperimentSummary {
    pub fn new(spec: &ExperimentSpec) -> Self {
        Self { spec: spec.clone(), rows: Vec::new(), stats: Vec::new(), checks: Vec::new(), data: DataTable::default(), extra: Vec::new() }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn stat(&self, name: &str) -> Option<f64> {
        self.stats.iter().find(|(k, _)| k == name).map(|&(_, v)| v)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub(crate) fn set_stat(&mut self, name: impl Into<String>, value: f64) {
        self.stats.push((name.into(), value));
    }

    /// Flat key-value form; keys are sorted so the output is canonical.
    pub fn to_json(&self) -> Value {
        let mut map = Map::new();
        map.insert("version".into(), Value::from(VERSION));
        map.insert("passed".into(), Value::from(self.passed()));
        for (k, v) in self.spec.echo() {
            map.insert(format!("spec.{k}"), Value::from(v));
        }
        for (i, row) in self.rows.iter().enumerate() {
            let key = |f: &str| format!("grid.{i:04}.{f}");
            map.insert(key("x"), number(row.x));
            map.insert(key("mean"), number(row.mean));
            map.insert(key("std_err"), number(row.std_err));
            map.insert(key("replicas"), Value::from(row.replicas));
            if let Some(t) = row.target {
                map.insert(key("target"), number(t));
            }
        }
        for (k, v) in &self.stats {
            map.insert(format!("stat.{k}"), number(*v));
        }
        for c in &self.checks {
            let key = |f: &str| format!("check.{}.{f}", c.name);
            map.insert(key("value"), number(c.value));
            map.insert(key("lower"), number(c.lower));
            map.insert(key("upper"), number(c.upper));
            map.insert(key("passed"), Value::from(c.passed));
        }
        Value::Object(map)
    }

    /// Writes the summary and data files and returns their paths.
    pub fn write_files(&self, prefix: &Path) -> Result<Vec<PathBuf>, HarnessError> {
        let with = |suffix: &str| {
            let mut s = prefix.as_os_str().to_owned();
            s.push(suffix);
            PathBuf::from(s)
        };
        let mut written = Vec::new();
        let path = with(".summary.json");
        let mut f = BufWriter::new(File::create(&path)?);
        serde_json::to_writer_pretty(&mut f, &self.to_json())?;
        writeln!(f)?;
        f.flush()?;
        written.push(path);
        let path = with(".data.csv");
        self.data.write_csv(BufWriter::new(File::create(&path)?))?;
        written.push(path);
        for (name, table) in &self.extra {
            let path = with(&format!(".{name}.csv"));
            table.write_csv(BufWriter::new(File::create(&path)?))?;
            written.push(path);
        }
        Ok(written)
    }

    /// Human-readable report: derived statistics then one line per check.
    pub fn report(&self) -> String {
        let mut s =
            format!("experiment {} (n={}, d={}, u={}, seed={})\n", self.spec.kind, self.spec.n, self.spec.d, self.spec.u, self.spec.seed);
        for (k, v) in &self.stats {
            s.push_str(&format!("  {k} = {v:.6}\n"));
        }
        for c in &self.checks {
            s.push_str(&format!("  {}\n", c.line()));
        }
        s
    }
}

/// JSON has no infinities or NaN; those become `null`.
fn number(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}
