//! Configuration-driven sweeps over the blockade simulator, written out as
//! CSV with a JSON metadata sidecar.

pub mod config;
pub mod output;
pub mod task;

use std::path::{Path, PathBuf};
use std::time::Instant;

use thiserror::Error;

pub use config::{Axis, ConfigError, RunConfig, Setting, Variable};
pub use output::{read_csv, sidecar_path, summarize, write_csv, write_sidecar, OutputError, Summary};
pub use task::{effective_config, run_task, PointFailure, SweepResult, Task, TaskError};

#[derive(Debug, Error)]
pub enum AppError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Task(#[from] TaskError),
    #[error(transparent)]
    Output(#[from] OutputError),
}

impl AppError {
    /// 1 for anything the user can fix in the inputs, 2 for solver failures.
    pub fn exit_code(&self) -> u8 {
        match self {
            AppError::Config(_) | AppError::Output(_) | AppError::Task(TaskError::Config(_)) => 1,
            AppError::Task(_) => 2,
        }
    }
}

#[derive(Debug)]
pub struct Report {
    pub result: SweepResult,
    pub sidecar: PathBuf,
    pub summary: Summary,
}

/// Loads the configuration (defaults when `config_path` is `None`), runs
/// the task, and writes `out` plus its sidecar.
pub fn execute(
    task: Task,
    config_path: Option<&Path>,
    out: &Path,
    overrides: &[String],
) -> Result<Report, AppError> {
    let config = match config_path {
        Some(p) => RunConfig::load(p, overrides)?,
        None => RunConfig::parse("", "<defaults>", overrides)?,
    };
    let start = Instant::now();
    let result = run_task(&config, task)?;
    let elapsed = start.elapsed().as_secs_f64();
    write_csv(&result, out)?;
    let sidecar = write_sidecar(out, task, &effective_config(&config, task), &result, elapsed)?;
    for f in &result.failures {
        log::warn!("row {} failed: {}", f.row, f.message);
    }
    Ok(Report {
        summary: summarize(&result),
        result,
        sidecar,
    })
}
