//! Command-line front end for the `srt-core` evaluators.
//!
//! [`parse_and_validate`] turns an argument vector into a [`RunConfig`],
//! [`run`] evaluates it and writes the CSV (and optional gnuplot script).

pub mod config;
pub mod output;
pub mod plot;

use std::path::PathBuf;

use srt_core::sweep::{run_snr_sweep, run_srt_curve};
use srt_core::{SrtError, SweepRow};

pub use config::{parse_and_validate, threads_from_env, Command, RunConfig, THREADS_ENV};
pub use output::{emit_csv, write_csv, CSV_HEADER};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Rejected by the argument parser; also carries `--help` / `--version`.
    #[error(transparent)]
    Usage(#[from] clap::Error),
    #[error("invalid {flag}: {reason}")]
    Invalid { flag: &'static str, reason: String },
    #[error(transparent)]
    Core(#[from] SrtError),
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

/// Evaluates the configured rows without writing anything.
pub fn evaluate(config: &RunConfig) -> Result<Vec<SweepRow>, CliError> {
    let rows = match &config.command {
        Command::Point | Command::Sweep => run_snr_sweep(&config.spec)?,
        Command::SrtCurve { n_values } => run_srt_curve(&config.spec, n_values)?,
    };
    Ok(rows)
}

/// Evaluates and writes the CSV and plot script. Returns the rows so the
/// caller can report failures.
pub fn run(config: &RunConfig) -> Result<Vec<SweepRow>, CliError> {
    let rows = evaluate(config)?;
    match &config.output {
        Some(path) => emit_csv(&rows, path)?,
        None => {
            let stdout = std::io::stdout();
            write_csv(&rows, stdout.lock())?;
        }
    }
    if let (Some(script), Some(csv_path)) = (&config.plot_script, &config.output) {
        let text = plot::gnuplot_script(&config.command, &rows, csv_path);
        std::fs::write(script, text).map_err(|source| CliError::Io {
            path: script.clone(),
            source,
        })?;
    }
    Ok(rows)
}
