//! Configuration, dispatch and report writing for the `willmore` binary.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::fs;
use std::path::{Path, PathBuf};

pub use commands::{execute, Outcome, THREADS_ENV};
pub use config::{Command, RunConfig};
pub use error::CliError;
pub use output::{emit_plot_data, CheckRow, Rows, Series, ThmRow};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_VIOLATION: i32 = 2;

/// Command-line overrides applied on top of the config file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub tol: Option<f64>,
    pub p: Option<f64>,
    pub q: Option<f64>,
    pub eps_grid: Option<Vec<f64>>,
    pub b_grid: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub csv: PathBuf,
    pub plots: Vec<PathBuf>,
    pub rows: usize,
    pub failures: usize,
}

impl Summary {
    pub fn exit_code(&self) -> i32 {
        if self.failures == 0 {
            EXIT_PASS
        } else {
            EXIT_VIOLATION
        }
    }
}

/// Loads `config`, runs `command` and writes `<out>/<command>.csv` plus any plot
/// data under `<out>/plot`.
pub fn run(command: Command, config: &Path, overrides: Overrides) -> Result<Summary, CliError> {
    let mut cfg = RunConfig::load(config)?;
    if let Some(c) = cfg.command.filter(|&c| c != command) {
        return Err(CliError::Usage(format!("config is for `{c}` but `{command}` was requested")));
    }
    if let Some(tol) = overrides.tol {
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(CliError::Usage(format!("--tol must be positive, got {tol}")));
        }
        cfg.tol = tol;
    }
    cfg.p = overrides.p.or(cfg.p);
    cfg.q = overrides.q.or(cfg.q);
    cfg.eps_grid = overrides.eps_grid.or(cfg.eps_grid);
    cfg.b_grid = overrides.b_grid.or(cfg.b_grid);
    let out = overrides.out.or_else(|| cfg.out.clone()).unwrap_or_else(|| PathBuf::from("."));

    let outcome = execute(command, &cfg)?;
    fs::create_dir_all(&out).map_err(|source| CliError::Io { path: out.clone(), source })?;
    let csv = out.join(format!("{command}.csv"));
    outcome.rows.write(&csv)?;
    let plots = if outcome.plots.is_empty() { Vec::new() } else { emit_plot_data(&out.join("plot"), &outcome.plots)? };
    Ok(Summary { csv, plots, rows: outcome.rows.len(), failures: outcome.rows.failures() })
}
