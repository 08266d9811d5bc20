//! Command-line experiment runner.
//!
//! Each run writes `<out>/<experiment>.csv` and `<out>/<experiment>.summary`.
//! Exit status: 0 when every check passes, 1 on a failed check or numerical
//! error, 2 on a configuration error.

mod config;
mod experiments;
mod report;

pub use config::{ConfigError, ExperimentConfig, Overrides, Section, EXPERIMENTS};
pub use report::{num, Check, Report, Summary, Table};

use clap::Parser;
use std::path::PathBuf;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "radmoser", about = "Run a named experiment and write its table and summary")]
pub struct Args {
    /// TOML file with run settings and per-experiment tables.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Experiment name; overrides the file.
    #[arg(long)]
    pub experiment: Option<String>,
    /// Output directory (default `out`).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Check tolerance; each experiment documents which check it applies to.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long = "grid-n")]
    pub grid_n: Option<usize>,
}

/// Validates every experiment table in the config, then runs the selected one.
pub fn run(cfg: &ExperimentConfig) -> Result<Report, ConfigError> {
    for name in cfg.sections.keys() {
        if name != &cfg.experiment {
            let mut probe = cfg.clone();
            probe.experiment = name.clone();
            probe.seed = Some(probe.seed.unwrap_or(0));
            let _ = experiments::prepare(&probe, name)?;
        }
    }
    let (table, job) = experiments::prepare(cfg, &cfg.experiment)?;
    let mut rep = Report { table, summary: Summary::default() };
    rep.summary.entry("experiment", &cfg.experiment);
    rep.summary.entry("seed", cfg.seed.map(|s| s.to_string()).unwrap_or_else(|| "none".into()));
    if let Some(t) = cfg.tol {
        rep.summary.value("tol", t);
    }
    if let Some(n) = cfg.grid_n {
        rep.summary.entry("grid_n", n);
    }
    if let Err(e) = job(&mut rep) {
        rep.summary.failure = Some((e.code().to_string(), e.to_string()));
    }
    Ok(rep)
}

/// Full command-line behaviour; returns the exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args = match Args::try_parse_from(args) {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_PASS };
        }
    };
    let text = match &args.config {
        Some(p) => match std::fs::read_to_string(p) {
            Ok(t) => Some(t),
            Err(e) => {
                eprintln!("error: cannot read {}: {e}", p.display());
                return EXIT_CONFIG;
            }
        },
        None => None,
    };
    let over = Overrides { experiment: args.experiment, out: args.out, seed: args.seed, tol: args.tol, grid_n: args.grid_n };
    let cfg = match ExperimentConfig::resolve(text.as_deref(), over) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    let rep = match run(&cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    match rep.write(&cfg.out, &cfg.experiment) {
        Ok((csv, summary)) => println!("wrote {} and {}", csv.display(), summary.display()),
        Err(e) => {
            eprintln!("error: cannot write reports to {}: {e}", cfg.out.display());
            return EXIT_FAIL;
        }
    }
    print!("{}", rep.summary.render());
    if rep.summary.passed() {
        EXIT_PASS
    } else {
        EXIT_FAIL
    }
}
