//! Flat `key = value` run configuration.
//!
//! `#` starts a comment. Absent keys take their defaults; unknown keys are
//! rejected. `delta` and `u` also accept `opt`, the closed-form optimum for
//! the point's coupling.

use std::fmt;
use std::path::{Path, PathBuf};

use blockade::analytics::{optimal_conditions, Branch};
use blockade::dynamics::{DEFAULT_TAU_MAX, DEFAULT_TAU_POINTS};
use blockade::model::{
    DEFAULT_CAVITY_CUTOFF, DEFAULT_DRIVE, DEFAULT_GAMMA, DEFAULT_MECHANICAL_CUTOFF,
    THERMAL_MECHANICAL_CUTOFF,
};
use blockade::{MechanicalBath, ModeDims, SystemParams};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{source_name}:{line}:{column}: {message}")]
    Parse {
        source_name: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{source_name}:{line}: unknown key `{key}`")]
    UnknownKey {
        source_name: String,
        line: usize,
        key: String,
    },
    #[error("invalid `{field}`: {reason}")]
    Invalid { field: String, reason: String },
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

fn invalid(field: impl Into<String>, reason: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        field: field.into(),
        reason: reason.into(),
    }
}

/// A parameter that is either given or taken from the closed-form optimum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Setting {
    Value(f64),
    Optimal,
}

impl fmt::Display for Setting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Setting::Value(v) => write!(f, "{v}"),
            Setting::Optimal => f.write_str("opt"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variable {
    Delta,
    U,
    G,
    Kappa,
    Gamma,
    Omega,
    NTh,
    GammaP,
    Tau,
}

impl Variable {
    pub const ALL: [Variable; 9] = [
        Variable::Delta,
        Variable::U,
        Variable::G,
        Variable::Kappa,
        Variable::Gamma,
        Variable::Omega,
        Variable::NTh,
        Variable::GammaP,
        Variable::Tau,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Variable::Delta => "delta",
            Variable::U => "u",
            Variable::G => "g",
            Variable::Kappa => "kappa",
            Variable::Gamma => "gamma",
            Variable::Omega => "omega",
            Variable::NTh => "n_th",
            Variable::GammaP => "gamma_p",
            Variable::Tau => "tau",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|v| v.name() == s)
    }
}

/// One sweep axis: a variable and its ordered sample values.
#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub var: Variable,
    pub values: Vec<f64>,
}

impl Axis {
    /// `count` evenly spaced values from `start` to `stop` inclusive.
    pub fn linear(var: Variable, start: f64, stop: f64, count: usize) -> Self {
        let values = (0..count)
            .map(|k| {
                if k + 1 == count {
                    stop
                } else {
                    start + (stop - start) * k as f64 / (count - 1) as f64
                }
            })
            .collect();
        Self { var, values }
    }

    pub fn listed(var: Variable, values: &[f64]) -> Self {
        Self {
            var,
            values: values.to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub delta: Setting,
    pub u: Setting,
    pub g: f64,
    pub kappa: f64,
    pub gamma: f64,
    pub omega: f64,
    pub n_th: f64,
    pub gamma_p: f64,
    pub n1: usize,
    pub n2: usize,
    pub nb: usize,
    pub tau_max: f64,
    pub tau_points: usize,
    pub sweep: Option<Axis>,
    pub sweep2: Option<Axis>,
    pub bath: MechanicalBath,
    pub branch: Branch,
    nb_explicit: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            delta: Setting::Optimal,
            u: Setting::Optimal,
            g: 1.0,
            kappa: 1.0,
            gamma: DEFAULT_GAMMA,
            omega: DEFAULT_DRIVE,
            n_th: 0.0,
            gamma_p: 0.0,
            n1: DEFAULT_CAVITY_CUTOFF,
            n2: DEFAULT_CAVITY_CUTOFF,
            nb: DEFAULT_MECHANICAL_CUTOFF,
            tau_max: DEFAULT_TAU_MAX,
            tau_points: DEFAULT_TAU_POINTS,
            sweep: None,
            sweep2: None,
            bath: MechanicalBath::Gamma,
            branch: Branch::Plus,
            nb_explicit: false,
        }
    }
}

/// A `key = value` entry with its position for error reports.
#[derive(Debug, Clone)]
struct Entry {
    key: String,
    value: String,
    source_name: String,
    line: usize,
    value_column: usize,
}

impl Entry {
    fn error(&self, message: impl Into<String>) -> ConfigError {
        ConfigError::Parse {
            source_name: self.source_name.clone(),
            line: self.line,
            column: self.value_column,
            message: message.into(),
        }
    }

    fn real(&self) -> Result<f64, ConfigError> {
        let v: f64 = self
            .value
            .parse()
            .map_err(|_| self.error(format!("`{}` expects a number, got `{}`", self.key, self.value)))?;
        if !v.is_finite() {
            return Err(self.error(format!("`{}` must be finite", self.key)));
        }
        Ok(v)
    }

    fn count(&self) -> Result<usize, ConfigError> {
        self.value.parse().map_err(|_| {
            self.error(format!(
                "`{}` expects a non-negative integer, got `{}`",
                self.key, self.value
            ))
        })
    }

    fn setting(&self) -> Result<Setting, ConfigError> {
        if self.value == "opt" {
            Ok(Setting::Optimal)
        } else {
            self.real().map(Setting::Value)
        }
    }

    fn flag(&self) -> Result<bool, ConfigError> {
        match self.value.as_str() {
            "true" => Ok(true),
            "false" => Ok(false),
            other => Err(self.error(format!("`{}` expects true or false, got `{other}`", self.key))),
        }
    }

    fn list(&self) -> Result<Vec<f64>, ConfigError> {
        self.value
            .split(',')
            .map(|s| {
                let s = s.trim();
                s.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| self.error(format!("`{}` has a bad list element `{s}`", self.key)))
            })
            .collect()
    }
}

const KEYS: &[&str] = &[
    "delta",
    "u",
    "g",
    "kappa",
    "gamma",
    "omega",
    "n_th",
    "gamma_p",
    "n1",
    "n2",
    "nb",
    "tau_max",
    "tau_points",
    "legacy_lb_kappa",
    "branch",
];
const AXIS_KEYS: &[&str] = &["var", "start", "stop", "count", "values", "scale"];

fn known(key: &str) -> bool {
    if KEYS.contains(&key) {
        return true;
    }
    match key.split_once('.') {
        Some(("sweep" | "sweep2", field)) => AXIS_KEYS.contains(&field),
        _ => false,
    }
}

fn tokenize(text: &str, source_name: &str) -> Result<Vec<Entry>, ConfigError> {
    let mut entries: Vec<Entry> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("");
        if content.trim().is_empty() {
            continue;
        }
        let lead = content.len() - content.trim_start().len();
        let Some(eq) = content.find('=') else {
            return Err(ConfigError::Parse {
                source_name: source_name.into(),
                line,
                column: lead + 1,
                message: "expected `key = value`".into(),
            });
        };
        let key = content[..eq].trim();
        if key.is_empty() {
            return Err(ConfigError::Parse {
                source_name: source_name.into(),
                line,
                column: lead + 1,
                message: "missing key before `=`".into(),
            });
        }
        let after = &content[eq + 1..];
        let value = after.trim();
        let value_column = eq + 2 + (after.len() - after.trim_start().len());
        if value.is_empty() {
            return Err(ConfigError::Parse {
                source_name: source_name.into(),
                line,
                column: eq + 2,
                message: format!("missing value for `{key}`"),
            });
        }
        if !known(key) {
            return Err(ConfigError::UnknownKey {
                source_name: source_name.into(),
                line,
                key: key.into(),
            });
        }
        if let Some(prev) = entries.iter().find(|e| e.key == key) {
            return Err(ConfigError::Parse {
                source_name: source_name.into(),
                line,
                column: lead + 1,
                message: format!("`{key}` already set on line {}", prev.line),
            });
        }
        entries.push(Entry {
            key: key.into(),
            value: value.into(),
            source_name: source_name.into(),
            line,
            value_column,
        });
    }
    Ok(entries)
}

/// Parses `key=value` command-line overrides; the n-th override reports as
/// line n of `<override>`.
fn tokenize_overrides(overrides: &[String]) -> Result<Vec<Entry>, ConfigError> {
    let mut out: Vec<Entry> = Vec::new();
    for (i, o) in overrides.iter().enumerate() {
        let mut entry = tokenize(o, "<override>")?.pop().ok_or_else(|| ConfigError::Parse {
            source_name: "<override>".into(),
            line: i + 1,
            column: 1,
            message: "empty override".into(),
        })?;
        entry.line = i + 1;
        out.retain(|e| e.key != entry.key);
        out.push(entry);
    }
    Ok(out)
}

#[derive(Default)]
struct AxisDraft {
    var: Option<Entry>,
    start: Option<Entry>,
    stop: Option<Entry>,
    count: Option<Entry>,
    values: Option<Entry>,
}

impl AxisDraft {
    fn is_empty(&self) -> bool {
        self.var.is_none()
            && self.start.is_none()
            && self.stop.is_none()
            && self.count.is_none()
            && self.values.is_none()
    }

    fn build(self, prefix: &str) -> Result<Option<Axis>, ConfigError> {
        if self.is_empty() {
            return Ok(None);
        }
        let var_entry = self
            .var
            .ok_or_else(|| invalid(format!("{prefix}.var"), "an axis needs a variable"))?;
        let var = Variable::parse(&var_entry.value).ok_or_else(|| {
            let names: Vec<_> = Variable::ALL.iter().map(|v| v.name()).collect();
            var_entry.error(format!(
                "unknown sweep variable `{}` (expected one of {})",
                var_entry.value,
                names.join(", ")
            ))
        })?;
        let axis = if let Some(values) = self.values {
            if self.start.is_some() || self.stop.is_some() || self.count.is_some() {
                return Err(invalid(
                    format!("{prefix}.values"),
                    "give either a value list or start/stop/count, not both",
                ));
            }
            let v = values.list()?;
            if v.is_empty() {
                return Err(invalid(format!("{prefix}.values"), "needs at least one value"));
            }
            if v.windows(2).any(|w| w[1] <= w[0]) {
                return Err(invalid(format!("{prefix}.values"), "must be strictly increasing"));
            }
            Axis::listed(var, &v)
        } else {
            let need = |e: Option<Entry>, f: &str| {
                e.ok_or_else(|| invalid(format!("{prefix}.{f}"), "required unless a value list is given"))
            };
            let start = need(self.start, "start")?.real()?;
            let stop = need(self.stop, "stop")?.real()?;
            let count = need(self.count, "count")?.count()?;
            if count < 2 {
                return Err(invalid(format!("{prefix}.count"), format!("{count} must be at least 2")));
            }
            if !(start < stop) {
                return Err(invalid(
                    format!("{prefix}.start"),
                    format!("start {start} must be below stop {stop}"),
                ));
            }
            Axis::linear(var, start, stop, count)
        };
        Ok(Some(axis))
    }
}

impl RunConfig {
    /// Parses configuration text plus command-line overrides, which take
    /// precedence over file entries.
    pub fn parse(text: &str, source_name: &str, overrides: &[String]) -> Result<Self, ConfigError> {
        let mut entries = tokenize(text, source_name)?;
        let extra = tokenize_overrides(overrides)?;
        entries.retain(|e| !extra.iter().any(|o| o.key == e.key));
        entries.extend(extra);

        let mut cfg = RunConfig::default();
        let mut axes = [AxisDraft::default(), AxisDraft::default()];
        for e in entries {
            match e.key.as_str() {
                "delta" => cfg.delta = e.setting()?,
                "u" => cfg.u = e.setting()?,
                "g" => cfg.g = e.real()?,
                "kappa" => cfg.kappa = e.real()?,
                "gamma" => cfg.gamma = e.real()?,
                "omega" => cfg.omega = e.real()?,
                "n_th" => cfg.n_th = e.real()?,
                "gamma_p" => cfg.gamma_p = e.real()?,
                "n1" => cfg.n1 = e.count()?,
                "n2" => cfg.n2 = e.count()?,
                "nb" => {
                    cfg.nb = e.count()?;
                    cfg.nb_explicit = true;
                }
                "tau_max" => cfg.tau_max = e.real()?,
                "tau_points" => cfg.tau_points = e.count()?,
                "legacy_lb_kappa" => {
                    cfg.bath = if e.flag()? {
                        MechanicalBath::LegacyKappa
                    } else {
                        MechanicalBath::Gamma
                    }
                }
                "branch" => {
                    cfg.branch = match e.value.as_str() {
                        "plus" => Branch::Plus,
                        "minus" => Branch::Minus,
                        other => return Err(e.error(format!("`branch` expects plus or minus, got `{other}`"))),
                    }
                }
                key => {
                    let (prefix, field) = key.split_once('.').expect("axis keys are dotted");
                    let draft = &mut axes[usize::from(prefix == "sweep2")];
                    match field {
                        "var" => draft.var = Some(e),
                        "start" => draft.start = Some(e),
                        "stop" => draft.stop = Some(e),
                        "count" => draft.count = Some(e),
                        "values" => draft.values = Some(e),
                        "scale" if e.value == "linear" => {}
                        "scale" => return Err(e.error("only `linear` scale is supported")),
                        _ => unreachable!("filtered by known()"),
                    }
                }
            }
        }
        let [a, b] = axes;
        cfg.sweep = a.build("sweep")?;
        cfg.sweep2 = b.build("sweep2")?;
        cfg.validate()?;
        cfg.apply_thermal_cutoff();
        Ok(cfg)
    }

    pub fn load(path: &Path, overrides: &[String]) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text, &path.display().to_string(), overrides)
    }

    fn validate(&self) -> Result<(), ConfigError> {
        if !(self.kappa > 0.0) {
            return Err(invalid("kappa", format!("{} must be positive", self.kappa)));
        }
        for (field, v) in [
            ("gamma", self.gamma),
            ("omega", self.omega),
            ("n_th", self.n_th),
            ("gamma_p", self.gamma_p),
        ] {
            if v < 0.0 {
                return Err(invalid(field, format!("{v} must be non-negative")));
            }
        }
        for (field, n) in [("n1", self.n1), ("n2", self.n2), ("nb", self.nb)] {
            if n < 2 {
                return Err(invalid(field, format!("cutoff {n} must be at least 2")));
            }
        }
        if !(self.tau_max > 0.0) {
            return Err(invalid("tau_max", format!("{} must be positive", self.tau_max)));
        }
        if self.tau_points < 2 {
            return Err(invalid("tau_points", format!("{} must be at least 2", self.tau_points)));
        }
        for (name, axis) in [("sweep", &self.sweep), ("sweep2", &self.sweep2)] {
            let Some(axis) = axis else { continue };
            let lowest = axis.values[0];
            let bad = match axis.var {
                Variable::Kappa => lowest <= 0.0,
                Variable::Gamma | Variable::Omega | Variable::NTh | Variable::GammaP | Variable::Tau => {
                    lowest < 0.0
                }
                _ => false,
            };
            if bad {
                return Err(invalid(
                    format!("{name}.var"),
                    format!("{} cannot take the value {lowest}", axis.var.name()),
                ));
            }
        }
        if let (Some(a), Some(b)) = (&self.sweep, &self.sweep2) {
            if a.var == b.var {
                return Err(invalid("sweep2.var", "both axes sweep the same variable"));
            }
        }
        Ok(())
    }

    fn sweeps(&self, var: Variable) -> bool {
        [&self.sweep, &self.sweep2]
            .into_iter()
            .flatten()
            .any(|a| a.var == var)
    }

    /// Raises the mechanical cutoff for thermal runs unless it was given.
    fn apply_thermal_cutoff(&mut self) {
        if !self.nb_explicit && (self.n_th > 0.0 || self.sweeps(Variable::NTh)) {
            self.nb = self.nb.max(THERMAL_MECHANICAL_CUTOFF);
        }
    }

    /// Re-applies the thermal cutoff rule after a task installs its default
    /// axes.
    pub fn with_default_axes(&self, primary: Option<Axis>, secondary: Option<Axis>) -> Self {
        let mut c = self.clone();
        if c.sweep.is_none() {
            c.sweep = primary;
        }
        if c.sweep2.is_none() {
            // A default second axis over the variable already swept would
            // overwrite the first axis at every point.
            let primary_var = c.sweep.as_ref().map(|a| a.var);
            c.sweep2 = secondary.filter(|a| Some(a.var) != primary_var);
        }
        c.apply_thermal_cutoff();
        c
    }

    pub fn nb_explicit(&self) -> bool {
        self.nb_explicit
    }

    /// Model parameters with the given axis values substituted. `opt`
    /// settings resolve against the point's own g and κ.
    pub fn params_at(&self, assignments: &[(Variable, f64)]) -> blockade::Result<SystemParams> {
        let mut c = self.clone();
        let (mut delta, mut u) = (None, None);
        for &(var, v) in assignments {
            match var {
                Variable::Delta => delta = Some(v),
                Variable::U => u = Some(v),
                Variable::G => c.g = v,
                Variable::Kappa => c.kappa = v,
                Variable::Gamma => c.gamma = v,
                Variable::Omega => c.omega = v,
                Variable::NTh => c.n_th = v,
                Variable::GammaP => c.gamma_p = v,
                Variable::Tau => {}
            }
        }
        let needs_opt = (delta.is_none() && c.delta == Setting::Optimal) || (u.is_none() && c.u == Setting::Optimal);
        let opt = if needs_opt {
            Some(optimal_conditions(c.g, c.kappa, c.branch)?)
        } else {
            None
        };
        let resolve = |given: Option<f64>, setting: Setting, pick: fn(&blockade::OptimalPoint) -> f64| {
            given.unwrap_or_else(|| match setting {
                Setting::Value(v) => v,
                Setting::Optimal => pick(opt.as_ref().expect("optimum resolved above")),
            })
        };
        let p = SystemParams {
            delta: resolve(delta, c.delta, |o| o.delta_opt),
            kerr: resolve(u, c.u, |o| o.u_opt),
            coupling: c.g,
            kappa: c.kappa,
            gamma: c.gamma,
            drive: c.omega,
            n_th: c.n_th,
            gamma_p: c.gamma_p,
            dims: ModeDims::new(c.n1, c.n2, c.nb)?,
            bath: c.bath,
        };
        p.validate()?;
        Ok(p)
    }

    /// Effective settings, one `(key, value)` pair per key.
    pub fn echo(&self) -> Vec<(String, String)> {
        let mut out: Vec<(String, String)> = vec![
            ("delta".into(), self.delta.to_string()),
            ("u".into(), self.u.to_string()),
            ("g".into(), self.g.to_string()),
            ("kappa".into(), self.kappa.to_string()),
            ("gamma".into(), self.gamma.to_string()),
            ("omega".into(), self.omega.to_string()),
            ("n_th".into(), self.n_th.to_string()),
            ("gamma_p".into(), self.gamma_p.to_string()),
            ("n1".into(), self.n1.to_string()),
            ("n2".into(), self.n2.to_string()),
            ("nb".into(), self.nb.to_string()),
            ("tau_max".into(), self.tau_max.to_string()),
            ("tau_points".into(), self.tau_points.to_string()),
            (
                "legacy_lb_kappa".into(),
                (self.bath == MechanicalBath::LegacyKappa).to_string(),
            ),
            (
                "branch".into(),
                match self.branch {
                    Branch::Plus => "plus",
                    Branch::Minus => "minus",
                }
                .into(),
            ),
        ];
        for (name, axis) in [("sweep", &self.sweep), ("sweep2", &self.sweep2)] {
            if let Some(a) = axis {
                out.push((format!("{name}.var"), a.var.name().into()));
                let vals: Vec<String> = a.values.iter().map(|v| v.to_string()).collect();
                out.push((format!("{name}.values"), vals.join(",")));
            }
        }
        out
    }
}
