//! Experiment configuration: a TOML file with top-level run settings and one
//! table per experiment, overridden by command-line flags.

use std::cell::RefCell;
use std::collections::BTreeSet;
use std::path::PathBuf;
use toml::{Table, Value};

/// Configuration problem; always maps to exit status 2.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

pub type ConfigResult<T> = std::result::Result<T, ConfigError>;

fn err<T>(msg: impl Into<String>) -> ConfigResult<T> {
    Err(ConfigError(msg.into()))
}

pub const EXPERIMENTS: [&str; 13] = [
    "regimes",
    "norms",
    "verify-hardy",
    "verify-embedding-sharpness",
    "moser-norms",
    "blowup",
    "maximize",
    "critical-k1",
    "navier-constants",
    "coefficients",
    "green-roundtrip",
    "solve-power",
    "solve-exp",
];

const RUN_KEYS: [&str; 5] = ["experiment", "out", "seed", "tol", "grid-n"];

/// Everything needed to run one experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: String,
    pub out: PathBuf,
    pub seed: Option<u64>,
    pub tol: Option<f64>,
    pub grid_n: Option<usize>,
    /// Per-experiment tables, keyed by experiment name.
    pub sections: Table,
}

/// Values given on the command line; each one overrides the file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub experiment: Option<String>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub tol: Option<f64>,
    pub grid_n: Option<usize>,
}

impl ExperimentConfig {
    /// Parses the file text (if any) and applies the overrides.
    pub fn resolve(text: Option<&str>, over: Overrides) -> ConfigResult<Self> {
        let table: Table = match text {
            Some(t) => t.parse().map_err(|e| ConfigError(format!("cannot parse config: {e}")))?,
            None => Table::new(),
        };
        let mut sections = Table::new();
        for (key, value) in &table {
            if RUN_KEYS.contains(&key.as_str()) {
                continue;
            }
            if !EXPERIMENTS.contains(&key.as_str()) {
                return err(format!("unknown key `{key}`"));
            }
            match value {
                Value::Table(_) => {
                    sections.insert(key.clone(), value.clone());
                }
                _ => return err(format!("key `{key}` must be a table of experiment parameters")),
            }
        }
        let top = Section::new("run", Some(&table));
        let experiment = match over.experiment {
            Some(e) => e,
            None => top.opt_string("experiment")?.ok_or_else(|| ConfigError("no experiment given".into()))?,
        };
        if !EXPERIMENTS.contains(&experiment.as_str()) {
            return err(format!("unknown experiment `{experiment}`"));
        }
        let out = match over.out {
            Some(o) => o,
            None => top.opt_string("out")?.map(PathBuf::from).unwrap_or_else(|| PathBuf::from("out")),
        };
        let seed = match over.seed {
            Some(s) => Some(s),
            None => top.opt_u64("seed")?,
        };
        let tol = match over.tol {
            Some(t) => Some(t),
            None => top.opt_f64("tol")?,
        };
        if let Some(t) = tol {
            if !(t > 0.0) {
                return err(format!("key `tol` must be positive, got {t}"));
            }
        }
        let grid_n = match over.grid_n {
            Some(n) => Some(n),
            None => top.opt_u64("grid-n")?.map(|n| n as usize),
        };
        if let Some(n) = grid_n {
            if n < 16 {
                return err(format!("key `grid-n` must be at least 16, got {n}"));
            }
        }
        Ok(ExperimentConfig { experiment, out, seed, tol, grid_n, sections })
    }

    pub fn section(&self, name: &str) -> Section<'_> {
        Section::new(name, self.sections.get(name).and_then(Value::as_table))
    }

    /// The seed, which stochastic experiments must be given explicitly.
    pub fn require_seed(&self) -> ConfigResult<u64> {
        self.seed.ok_or_else(|| ConfigError(format!("experiment `{}` is stochastic and needs a seed", self.experiment)))
    }
}

/// Typed view of one parameter table that records which keys were read.
pub struct Section<'a> {
    name: String,
    table: Option<&'a Table>,
    used: RefCell<BTreeSet<String>>,
}

impl<'a> Section<'a> {
    pub fn new(name: &str, table: Option<&'a Table>) -> Self {
        Section { name: name.to_string(), table, used: RefCell::new(BTreeSet::new()) }
    }

    fn get(&self, key: &str) -> Option<&'a Value> {
        self.used.borrow_mut().insert(key.to_string());
        self.table.and_then(|t| t.get(key))
    }

    fn bad<T>(&self, key: &str, what: &str) -> ConfigResult<T> {
        err(format!("[{}] key `{key}` must be {what}", self.name))
    }

    pub fn opt_f64(&self, key: &str) -> ConfigResult<Option<f64>> {
        match self.get(key) {
            None => Ok(None),
            Some(Value::Float(x)) => Ok(Some(*x)),
            Some(Value::Integer(i)) => Ok(Some(*i as f64)),
            Some(_) => self.bad(key, "a number"),
        }
    }

    pub fn f64(&self, key: &str, default: f64) -> ConfigResult<f64> {
        Ok(self.opt_f64(key)?.unwrap_or(default))
    }

    pub fn opt_u64(&self, key: &str) -> ConfigResult<Option<u64>> {
        match self.get(key) {
            None => Ok(None),
            Some(Value::Integer(i)) if *i >= 0 => Ok(Some(*i as u64)),
            Some(_) => self.bad(key, "a nonnegative integer"),
        }
    }

    pub fn usize(&self, key: &str, default: usize) -> ConfigResult<usize> {
        Ok(self.opt_u64(key)?.map(|n| n as usize).unwrap_or(default))
    }

    pub fn opt_string(&self, key: &str) -> ConfigResult<Option<String>> {
        match self.get(key) {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(s.clone())),
            Some(_) => self.bad(key, "a string"),
        }
    }

    pub fn string(&self, key: &str, default: &str) -> ConfigResult<String> {
        Ok(self.opt_string(key)?.unwrap_or_else(|| default.to_string()))
    }

    pub fn f64_list(&self, key: &str, default: &[f64]) -> ConfigResult<Vec<f64>> {
        match self.get(key) {
            None => Ok(default.to_vec()),
            Some(Value::Array(a)) => a
                .iter()
                .map(|v| match v {
                    Value::Float(x) => Ok(*x),
                    Value::Integer(i) => Ok(*i as f64),
                    _ => self.bad(key, "a list of numbers"),
                })
                .collect(),
            Some(_) => self.bad(key, "a list of numbers"),
        }
    }

    pub fn usize_list(&self, key: &str, default: &[usize]) -> ConfigResult<Vec<usize>> {
        match self.get(key) {
            None => Ok(default.to_vec()),
            Some(Value::Array(a)) => a
                .iter()
                .map(|v| match v {
                    Value::Integer(i) if *i >= 0 => Ok(*i as usize),
                    _ => self.bad(key, "a list of nonnegative integers"),
                })
                .collect(),
            Some(_) => self.bad(key, "a list of nonnegative integers"),
        }
    }

    pub fn pair_list(&self, key: &str, default: &[(f64, f64)]) -> ConfigResult<Vec<(f64, f64)>> {
        match self.get(key) {
            None => Ok(default.to_vec()),
            Some(Value::Array(a)) => a
                .iter()
                .map(|v| {
                    let xs = v.as_array().filter(|x| x.len() == 2);
                    let num = |x: &Value| x.as_float().or_else(|| x.as_integer().map(|i| i as f64));
                    match xs.map(|x| (num(&x[0]), num(&x[1]))) {
                        Some((Some(a), Some(b))) => Ok((a, b)),
                        _ => self.bad(key, "a list of number pairs"),
                    }
                })
                .collect(),
            Some(_) => self.bad(key, "a list of number pairs"),
        }
    }

    /// Rejects every key that was never read.
    pub fn finish(self) -> ConfigResult<()> {
        let used = self.used.borrow();
        if let Some(t) = self.table {
            if let Some(k) = t.keys().find(|k| !used.contains(k.as_str())) {
                return err(format!("[{}] unknown key `{k}`", self.name));
            }
        }
        Ok(())
    }
}
