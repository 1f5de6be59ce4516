//! CSV data files and the JSON run-metadata sidecar.

use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

use crate::config::RunConfig;
use crate::task::{SweepResult, Task};

#[derive(Debug, Error)]
pub enum OutputError {
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },
}

/// Writes the header and one row per grid point. Floats use Rust's
/// shortest round-trip formatting; lines end in LF.
pub fn write_csv(result: &SweepResult, path: &Path) -> Result<(), OutputError> {
    let wrap = |source| OutputError::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)
        .map_err(wrap)?;
    w.write_record(&result.columns).map_err(wrap)?;
    for row in &result.rows {
        w.write_record(row.iter().map(|v| v.to_string())).map_err(wrap)?;
    }
    w.flush().map_err(|source| OutputError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Reads a file written by [`write_csv`] back into columns and rows.
pub fn read_csv(path: &Path) -> Result<(Vec<String>, Vec<Vec<f64>>), OutputError> {
    let wrap = |source| OutputError::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut r = csv::Reader::from_path(path).map_err(wrap)?;
    let columns = r.headers().map_err(wrap)?.iter().map(String::from).collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(wrap)?;
        let row = rec
            .iter()
            .map(|s| {
                s.parse::<f64>().map_err(|_| OutputError::Format {
                    path: path.to_path_buf(),
                    message: format!("`{s}` is not a number"),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        rows.push(row);
    }
    Ok((columns, rows))
}

/// `<out>.meta.json` next to the data file.
pub fn sidecar_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_os_string();
    s.push(".meta.json");
    PathBuf::from(s)
}

#[derive(Debug, Serialize)]
pub struct Summary {
    pub rows: usize,
    pub failed_rows: usize,
    /// Column the minimum refers to.
    pub column: String,
    pub min_value: Option<f64>,
    /// Axis values of the minimum row.
    pub min_at: Option<Vec<f64>>,
}

/// Minimum of the correlation column over successful rows.
pub fn summarize(result: &SweepResult) -> Summary {
    let column = result
        .columns
        .iter()
        .find(|c| *c == "g2" || *c == "log10_g2")
        .cloned()
        .unwrap_or_else(|| "g2".into());
    let k = result.columns.iter().position(|c| *c == column);
    let best = result.argmin(&column);
    Summary {
        rows: result.rows.len(),
        failed_rows: result.failures.len(),
        min_value: best.zip(k).map(|(r, k)| result.rows[r][k]),
        min_at: best.map(|r| result.rows[r][..result.axis_count].to_vec()),
        column,
    }
}

#[derive(Debug, Serialize)]
struct FailureRecord<'a> {
    row: usize,
    axis_values: &'a [f64],
    message: &'a str,
}

#[derive(Debug, Serialize)]
struct Sidecar<'a> {
    tool: &'static str,
    version: &'static str,
    core_version: &'static str,
    task: &'static str,
    data_file: String,
    config: serde_json::Map<String, serde_json::Value>,
    wall_time_seconds: f64,
    summary: Summary,
    failures: Vec<FailureRecord<'a>>,
}

pub fn write_sidecar(
    out: &Path,
    task: Task,
    config: &RunConfig,
    result: &SweepResult,
    wall_time_seconds: f64,
) -> Result<PathBuf, OutputError> {
    let path = sidecar_path(out);
    let sidecar = Sidecar {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        core_version: blockade::VERSION,
        task: task.name(),
        data_file: out.display().to_string(),
        config: config
            .echo()
            .into_iter()
            .map(|(k, v)| (k, serde_json::Value::String(v)))
            .collect(),
        wall_time_seconds,
        summary: summarize(result),
        failures: result
            .failures
            .iter()
            .map(|f| FailureRecord {
                row: f.row,
                axis_values: &f.axis_values,
                message: &f.message,
            })
            .collect(),
    };
    let text = serde_json::to_string_pretty(&sidecar).expect("sidecar serialises");
    std::fs::write(&path, text + "\n").map_err(|source| OutputError::Io {
        path: path.clone(),
        source,
    })?;
    Ok(path)
}
