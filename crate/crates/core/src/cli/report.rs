//! Comma-separated tables and `key = value` summaries.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

/// Fixed-width scientific formatting so repeated runs give identical bytes.
pub fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.12e}")
    } else if x.is_nan() {
        "nan".to_string()
    } else if x > 0.0 {
        "inf".to_string()
    } else {
        "-inf".to_string()
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut s = self.header.join(",");
        s.push('\n');
        for row in &self.rows {
            s.push_str(&row.join(","));
            s.push('\n');
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Ordered summary record: plain entries, named checks and an optional failure.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Summary {
    pub entries: Vec<(String, String)>,
    pub checks: Vec<Check>,
    /// `(code, message)` of a numerical error that stopped the experiment.
    pub failure: Option<(String, String)>,
}

impl Summary {
    pub fn entry(&mut self, key: &str, value: impl ToString) {
        self.entries.push((key.to_string(), value.to_string()));
    }

    pub fn value(&mut self, key: &str, x: f64) {
        self.entry(key, num(x));
    }

    pub fn check(&mut self, name: &str, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check { name: name.to_string(), passed, detail: detail.into() });
    }

    pub fn passed(&self) -> bool {
        self.failure.is_none() && self.checks.iter().all(|c| c.passed)
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.entries {
            let _ = writeln!(s, "{k} = {v}");
        }
        for c in &self.checks {
            let _ = writeln!(s, "check.{} = {}", c.name, if c.passed { "pass" } else { "fail" });
            if !c.detail.is_empty() {
                let _ = writeln!(s, "check.{}.detail = {}", c.name, c.detail);
            }
        }
        if let Some((code, msg)) = &self.failure {
            let _ = writeln!(s, "failure = {code}");
            let _ = writeln!(s, "failure.message = {}", msg.replace('\n', " "));
        }
        let _ = writeln!(s, "status = {}", if self.passed() { "pass" } else { "fail" });
        s
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    pub table: Table,
    pub summary: Summary,
}

impl Report {
    /// Writes `<name>.csv` and `<name>.summary` into `dir`.
    pub fn write(&self, dir: &Path, name: &str) -> std::io::Result<(PathBuf, PathBuf)> {
        std::fs::create_dir_all(dir)?;
        let csv = dir.join(format!("{name}.csv"));
        let summary = dir.join(format!("{name}.summary"));
        std::fs::write(&csv, self.table.to_csv())?;
        std::fs::write(&summary, self.summary.render())?;
        Ok((csv, summary))
    }
}
