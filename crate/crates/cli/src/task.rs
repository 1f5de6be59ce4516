//! Figure tasks: grids of steady-state solves, delayed correlations, and
//! the optimal-condition table.

use std::fmt;

use blockade::dynamics::{g2_tau, uniform_grid};
use blockade::liouville::occupations;
use blockade::sweep::{map, solve_point};
use blockade::{
    build_collapse_ops, build_hamiltonian, build_liouvillian, g2_zero, optimal_conditions, steady_state,
};
use thiserror::Error;

use crate::config::{Axis, RunConfig, Variable};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Task {
    DeltaSweep,
    TauSeries,
    Contour,
    ThermalSweep,
    DephasingSweep,
    OptimalTable,
}

impl Task {
    pub fn name(self) -> &'static str {
        match self {
            Task::DeltaSweep => "delta-sweep",
            Task::TauSeries => "tau-series",
            Task::Contour => "contour",
            Task::ThermalSweep => "thermal-sweep",
            Task::DephasingSweep => "dephasing-sweep",
            Task::OptimalTable => "optimal-table",
        }
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub const DEPHASING_RATES: [f64; 3] = [0.0, 0.001, 0.01];
pub const OPTIMAL_COUPLINGS: [f64; 4] = [1.0, 1.5, 2.0, 2.5];

#[derive(Debug, Error)]
pub enum TaskError {
    #[error("{0}")]
    Config(String),
    #[error("solver failed: {0}")]
    Solver(#[from] blockade::Error),
    #[error("all {0} grid points failed")]
    AllFailed(usize),
}

/// A grid point that produced no values.
#[derive(Debug, Clone, PartialEq)]
pub struct PointFailure {
    pub row: usize,
    pub axis_values: Vec<f64>,
    pub message: String,
}

/// Tabular result; failed rows hold NaN outside the axis columns.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub failures: Vec<PointFailure>,
    /// Number of leading axis columns.
    pub axis_count: usize,
}

impl SweepResult {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }

    pub fn is_failed(&self, row: usize) -> bool {
        self.failures.iter().any(|f| f.row == row)
    }

    /// Row of the smallest value in `column` among successful rows.
    pub fn argmin(&self, column: &str) -> Option<usize> {
        let k = self.columns.iter().position(|c| c == column)?;
        (0..self.rows.len())
            .filter(|&r| !self.is_failed(r) && self.rows[r][k].is_finite())
            .min_by(|&a, &b| self.rows[a][k].total_cmp(&self.rows[b][k]))
    }
}

fn default_axes(task: Task) -> (Option<Axis>, Option<Axis>) {
    let delta = Axis::linear(Variable::Delta, -1.0, 2.0, 101);
    match task {
        Task::DeltaSweep => (Some(delta), None),
        Task::TauSeries => (None, None),
        Task::Contour => (
            Some(Axis::linear(Variable::Delta, -1.0, 2.0, 61)),
            Some(Axis::linear(Variable::U, -1.0, 2.0, 61)),
        ),
        Task::ThermalSweep => (Some(Axis::linear(Variable::NTh, 0.0, 1.0, 21)), None),
        Task::DephasingSweep => (Some(delta), Some(Axis::listed(Variable::GammaP, &DEPHASING_RATES))),
        Task::OptimalTable => (Some(Axis::listed(Variable::G, &OPTIMAL_COUPLINGS)), None),
    }
}

/// The configuration a task actually runs with: task default axes fill
/// whatever the file left out.
pub fn effective_config(config: &RunConfig, task: Task) -> RunConfig {
    let (a, b) = default_axes(task);
    config.with_default_axes(a, b)
}

pub fn run_task(config: &RunConfig, task: Task) -> Result<SweepResult, TaskError> {
    let cfg = effective_config(config, task);
    let axes: Vec<&Axis> = [&cfg.sweep, &cfg.sweep2].into_iter().flatten().collect();
    if task != Task::TauSeries && axes.iter().any(|a| a.var == Variable::Tau) {
        return Err(TaskError::Config("`tau` can only be swept by the tau task".into()));
    }
    let result = match task {
        Task::TauSeries => tau_series(&cfg)?,
        Task::OptimalTable => optimal_table(&cfg)?,
        Task::Contour => {
            if cfg.sweep2.is_none() {
                return Err(TaskError::Config("contour needs two axes".into()));
            }
            grid(&cfg, true)
        }
        _ => grid(&cfg, false),
    };
    if !result.rows.is_empty() && result.failures.len() == result.rows.len() {
        return Err(TaskError::AllFailed(result.rows.len()));
    }
    Ok(result)
}

/// All axis assignments, secondary axis outermost.
fn grid_points(cfg: &RunConfig) -> Vec<Vec<(Variable, f64)>> {
    let primary = cfg.sweep.as_ref().expect("task installs a primary axis");
    match &cfg.sweep2 {
        None => primary.values.iter().map(|&x| vec![(primary.var, x)]).collect(),
        Some(second) => second
            .values
            .iter()
            .flat_map(|&y| primary.values.iter().map(move |&x| vec![(primary.var, x), (second.var, y)]))
            .collect(),
    }
}

fn grid(cfg: &RunConfig, log_scale: bool) -> SweepResult {
    let points = grid_points(cfg);
    let outcomes = map(&points, |assign| {
        cfg.params_at(assign)
            .and_then(|p| solve_point(&p))
    });
    let mut columns: Vec<String> = points[0].iter().map(|(v, _)| v.name().to_string()).collect();
    let axis_count = columns.len();
    columns.push(if log_scale { "log10_g2" } else { "g2" }.into());
    columns.extend(["n1", "n2", "nb", "residual"].map(String::from));

    let mut rows = Vec::with_capacity(points.len());
    let mut failures = Vec::new();
    for (row, (assign, outcome)) in points.iter().zip(outcomes).enumerate() {
        let mut r: Vec<f64> = assign.iter().map(|&(_, v)| v).collect();
        match outcome {
            Ok(s) => {
                let g2 = if log_scale { s.g2.log10() } else { s.g2 };
                r.extend([g2, s.n1, s.n2, s.nb, s.residual]);
            }
            Err(e) => {
                failures.push(PointFailure {
                    row,
                    axis_values: r.clone(),
                    message: e.to_string(),
                });
                r.extend([f64::NAN; 5]);
            }
        }
        rows.push(r);
    }
    SweepResult {
        columns,
        rows,
        failures,
        axis_count,
    }
}

fn tau_series(cfg: &RunConfig) -> Result<SweepResult, TaskError> {
    let grid = match &cfg.sweep {
        None => uniform_grid(cfg.tau_max, cfg.tau_points)?,
        Some(a) if a.var == Variable::Tau && a.values[0] == 0.0 => a.values.clone(),
        Some(_) => {
            return Err(TaskError::Config(
                "the tau task sweeps only `tau`, starting at 0".into(),
            ))
        }
    };
    if cfg.sweep2.is_some() {
        return Err(TaskError::Config("the tau task takes a single axis".into()));
    }
    let p = cfg.params_at(&[])?;
    let l = build_liouvillian(&build_hamiltonian(&p)?, &build_collapse_ops(&p)?)?;
    let rho = steady_state(&l)?;
    let residual = l.residual(&rho)?;
    let (n1, n2, nb) = occupations(&rho);
    let series = g2_tau(&l, &rho, &grid)?;
    if !series.weight_bound_holds() {
        log::warn!(
            "conditional weight grew to {} times its initial value",
            series.max_weight_ratio
        );
    }
    let steady = g2_zero(&rho)?;
    if (series.values[0] / steady - 1.0).abs() > 1e-6 {
        log::warn!("g2(0) from regression {} differs from steady state {steady}", series.values[0]);
    }
    Ok(SweepResult {
        columns: ["tau", "g2", "n1", "n2", "nb", "residual"].map(String::from).to_vec(),
        rows: grid
            .iter()
            .zip(&series.values)
            .map(|(&t, &g)| vec![t, g, n1, n2, nb, residual])
            .collect(),
        failures: Vec::new(),
        axis_count: 1,
    })
}

fn optimal_table(cfg: &RunConfig) -> Result<SweepResult, TaskError> {
    let axis = cfg.sweep.as_ref().expect("task installs a primary axis");
    if axis.var != Variable::G || cfg.sweep2.is_some() {
        return Err(TaskError::Config("the optimal task sweeps only `g`".into()));
    }
    let outcomes = map(&axis.values, |&g| -> blockade::Result<Vec<f64>> {
        let o = optimal_conditions(g, cfg.kappa, cfg.branch)?;
        let p = cfg.params_at(&[(Variable::G, g), (Variable::Delta, o.delta_opt), (Variable::U, o.u_opt)])?;
        let s = solve_point(&p)?;
        Ok(vec![o.delta_opt, o.u_opt, s.g2, s.n1, s.n2, s.nb, s.residual])
    });
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for (row, (&g, outcome)) in axis.values.iter().zip(outcomes).enumerate() {
        let mut r = vec![g];
        match outcome {
            Ok(v) => r.extend(v),
            Err(e) => {
                failures.push(PointFailure {
                    row,
                    axis_values: vec![g],
                    message: e.to_string(),
                });
                r.extend([f64::NAN; 7]);
            }
        }
        rows.push(r);
    }
    Ok(SweepResult {
        columns: ["g", "delta_opt", "u_opt", "g2", "n1", "n2", "nb", "residual"]
            .map(String::from)
            .to_vec(),
        rows,
        failures,
        axis_count: 1,
    })
}
