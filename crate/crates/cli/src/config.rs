//! Resolved run configuration: defaults, INI config file, and flag merging.
//!
//! The config file is INI-style with one section per command; keys mirror
//! the long flag names. Flags override file values, which override defaults:
//!
//! ```text
//! [solve-linear]
//! a = 0
//! b = 1
//! alpha = 1.5
//! y = const:1
//! n-grid = 101
//! ```

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CommandKind {
    SolveLinear,
    SolveNonlinear,
    Eigen,
    Lyapunov,
    Greens,
    Convergence,
}

impl CommandKind {
    pub fn name(self) -> &'static str {
        match self {
            CommandKind::SolveLinear => "solve-linear",
            CommandKind::SolveNonlinear => "solve-nonlinear",
            CommandKind::Eigen => "eigen",
            CommandKind::Lyapunov => "lyapunov",
            CommandKind::Greens => "greens",
            CommandKind::Convergence => "convergence",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
    Both,
}

impl OutputFormat {
    pub fn writes_csv(self) -> bool {
        matches!(self, OutputFormat::Csv | OutputFormat::Both)
    }

    pub fn embeds_data(self) -> bool {
        matches!(self, OutputFormat::Json | OutputFormat::Both)
    }
}

/// Fully resolved configuration, echoed verbatim into the JSON run report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: CommandKind,
    pub a: f64,
    pub b: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub y: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub f: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub q: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub lower: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub upper: Option<String>,
    pub n_grid: usize,
    pub rule_size: usize,
    pub tol: f64,
    pub max_iter: usize,
    pub damping: f64,
    pub method: String,
    pub n: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub study: Option<String>,
    pub out_dir: PathBuf,
    pub format: OutputFormat,
    pub plot_data: bool,
}

/// Raw option bag prior to resolution; every entry optional so the config
/// file and defaults can fill holes.
#[derive(Debug, Default, Clone, clap::Args)]
pub struct CommandArgs {
    /// Left endpoint of the interval
    #[arg(long)]
    pub a: Option<f64>,
    /// Right endpoint of the interval
    #[arg(long)]
    pub b: Option<f64>,
    /// Fractional order in (1, 2)
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Forcing y(t) (function spec)
    #[arg(long)]
    pub y: Option<String>,
    /// Right-hand side f(t, x) (function spec)
    #[arg(long)]
    pub f: Option<String>,
    /// Potential q(t) (function spec)
    #[arg(long)]
    pub q: Option<String>,
    /// Lower solution (function spec)
    #[arg(long)]
    pub lower: Option<String>,
    /// Upper solution (function spec)
    #[arg(long)]
    pub upper: Option<String>,
    /// Output grid size
    #[arg(long = "n-grid")]
    pub n_grid: Option<usize>,
    /// Quadrature points per panel
    #[arg(long = "rule-size")]
    pub rule_size: Option<usize>,
    /// Sup-norm convergence tolerance
    #[arg(long)]
    pub tol: Option<f64>,
    /// Iteration budget
    #[arg(long = "max-iter")]
    pub max_iter: Option<usize>,
    /// Relaxation factor for damped Picard, in (0, 1]
    #[arg(long)]
    pub damping: Option<f64>,
    /// Iteration scheme: picard | damped-picard | newton
    #[arg(long)]
    pub method: Option<String>,
    /// Discretization size (eigen), sample count (greens), reserved otherwise
    #[arg(long)]
    pub n: Option<usize>,
    /// Convergence study: rule | grid | eigen
    #[arg(long)]
    pub study: Option<String>,
    /// INI config file; the section matching the command supplies defaults
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory for the run artifacts
    #[arg(long = "out-dir")]
    pub out_dir: Option<PathBuf>,
    /// Tabular output routing: csv | json | both
    #[arg(long)]
    pub format: Option<String>,
    /// Also emit plot-data blocks (two-column, blank-line separated)
    #[arg(long = "plot-data")]
    pub plot_data: bool,
}

const KNOWN_KEYS: &[&str] = &[
    "a",
    "b",
    "alpha",
    "y",
    "f",
    "q",
    "lower",
    "upper",
    "n-grid",
    "rule-size",
    "tol",
    "max-iter",
    "damping",
    "method",
    "n",
    "study",
    "out-dir",
    "format",
    "plot-data",
];

/// Parses the section of `path` matching `command` into a key/value map.
/// Diagnostics carry the file line number and offending field.
pub fn load_ini_section(
    path: &Path,
    command: CommandKind,
) -> Result<BTreeMap<String, String>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Validation(format!("cannot read config {}: {e}", path.display())))?;
    let mut section = String::new();
    let mut values = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with(';') {
            continue;
        }
        if let Some(name) = line.strip_prefix('[') {
            let name = name.strip_suffix(']').ok_or_else(|| {
                CliError::Validation(format!(
                    "{}:{line_no}: unterminated section header",
                    path.display()
                ))
            })?;
            section = name.trim().to_string();
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            CliError::Validation(format!(
                "{}:{line_no}: expected 'key = value', got '{line}'",
                path.display()
            ))
        })?;
        let key = key.trim();
        if section == command.name() {
            if !KNOWN_KEYS.contains(&key) {
                return Err(CliError::Validation(format!(
                    "{}:{line_no}: unknown key '{key}' in section [{section}]",
                    path.display()
                )));
            }
            values.insert(key.to_string(), value.trim().to_string());
        }
    }
    Ok(values)
}

fn parsed<T: std::str::FromStr>(
    map: &BTreeMap<String, String>,
    key: &str,
) -> Result<Option<T>, CliError> {
    match map.get(key) {
        None => Ok(None),
        Some(raw) => raw.parse::<T>().map(Some).map_err(|_| {
            CliError::Validation(format!("config field '{key}': invalid value '{raw}'"))
        }),
    }
}

impl CommandArgs {
    /// Resolves flags over config-file values over defaults into a
    /// [`RunConfig`]. Validation failures name the offending field.
    pub fn resolve(mut self, command: CommandKind) -> Result<RunConfig, CliError> {
        if let Some(path) = self.config.take() {
            let file = load_ini_section(&path, command)?;
            self.a = self.a.or(parsed(&file, "a")?);
            self.b = self.b.or(parsed(&file, "b")?);
            self.alpha = self.alpha.or(parsed(&file, "alpha")?);
            self.y = self.y.or(file.get("y").cloned());
            self.f = self.f.or(file.get("f").cloned());
            self.q = self.q.or(file.get("q").cloned());
            self.lower = self.lower.or(file.get("lower").cloned());
            self.upper = self.upper.or(file.get("upper").cloned());
            self.n_grid = self.n_grid.or(parsed(&file, "n-grid")?);
            self.rule_size = self.rule_size.or(parsed(&file, "rule-size")?);
            self.tol = self.tol.or(parsed(&file, "tol")?);
            self.max_iter = self.max_iter.or(parsed(&file, "max-iter")?);
            self.damping = self.damping.or(parsed(&file, "damping")?);
            self.method = self.method.or(file.get("method").cloned());
            self.n = self.n.or(parsed(&file, "n")?);
            self.study = self.study.or(file.get("study").cloned());
            self.out_dir = self.out_dir.or(file.get("out-dir").map(PathBuf::from));
            self.format = self.format.or(file.get("format").cloned());
            if !self.plot_data {
                self.plot_data = parsed::<bool>(&file, "plot-data")?.unwrap_or(false);
            }
        }

        let require = |name: &str, v: Option<f64>| {
            v.ok_or_else(|| CliError::Validation(format!("missing required field '{name}'")))
        };
        let a = require("a", self.a)?;
        let b = require("b", self.b)?;
        if a >= b || !a.is_finite() || !b.is_finite() {
            return Err(CliError::Validation(format!(
                "field 'a'/'b': need finite a < b, got a = {a}, b = {b}"
            )));
        }
        let alpha = match command {
            CommandKind::Greens => self.alpha,
            _ => Some(require("alpha", self.alpha)?),
        };
        if let Some(al) = alpha {
            if !(al > 1.0 && al < 2.0) {
                return Err(CliError::Validation(format!(
                    "field 'alpha': must lie strictly inside (1, 2), got {al}"
                )));
            }
        }

        let format = match self.format.as_deref() {
            None | Some("csv") => OutputFormat::Csv,
            Some("json") => OutputFormat::Json,
            Some("both") => OutputFormat::Both,
            Some(other) => {
                return Err(CliError::Validation(format!(
                    "field 'format': expected csv, json, or both, got '{other}'"
                )))
            }
        };
        let method = self.method.unwrap_or_else(|| "damped-picard".into());
        if !["picard", "damped-picard", "newton"].contains(&method.as_str()) {
            return Err(CliError::Validation(format!(
                "field 'method': expected picard, damped-picard, or newton, got '{method}'"
            )));
        }

        let config = RunConfig {
            command,
            a,
            b,
            alpha,
            y: self.y,
            f: self.f,
            q: self.q,
            lower: self.lower,
            upper: self.upper,
            n_grid: self.n_grid.unwrap_or(101),
            rule_size: self.rule_size.unwrap_or(64),
            tol: self.tol.unwrap_or(1e-8),
            max_iter: self.max_iter.unwrap_or(500),
            damping: self.damping.unwrap_or(0.5),
            method,
            n: self.n.unwrap_or(match command {
                CommandKind::Greens => 200,
                _ => 128,
            }),
            study: self.study,
            out_dir: self.out_dir.unwrap_or_else(|| PathBuf::from(".")),
            format,
            plot_data: self.plot_data,
        };
        config.validate_for_command()?;
        Ok(config)
    }
}

impl RunConfig {
    fn validate_for_command(&self) -> Result<(), CliError> {
        let need = |name: &str, present: bool| {
            if present {
                Ok(())
            } else {
                Err(CliError::Validation(format!(
                    "command '{}' requires '--{name}'",
                    self.command.name()
                )))
            }
        };
        match self.command {
            CommandKind::SolveLinear => need("y", self.y.is_some()),
            CommandKind::SolveNonlinear => {
                need("f", self.f.is_some())?;
                need("lower", self.lower.is_some())?;
                need("upper", self.upper.is_some())
            }
            CommandKind::Lyapunov => need("q", self.q.is_some()),
            CommandKind::Eigen | CommandKind::Greens => Ok(()),
            CommandKind::Convergence => {
                if let Some(study) = &self.study {
                    if !["rule", "grid", "eigen"].contains(&study.as_str()) {
                        return Err(CliError::Validation(format!(
                            "field 'study': expected rule, grid, or eigen, got '{study}'"
                        )));
                    }
                }
                Ok(())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_required_fields() {
        let args = CommandArgs {
            a: Some(0.0),
            b: Some(1.0),
            alpha: Some(1.5),
            y: Some("const:1".into()),
            ..CommandArgs::default()
        };
        let config = args.resolve(CommandKind::SolveLinear).unwrap();
        assert_eq!(config.n_grid, 101);
        assert_eq!(config.rule_size, 64);
        assert_eq!(config.format, OutputFormat::Csv);

        let missing = CommandArgs {
            a: Some(0.0),
            b: Some(1.0),
            alpha: Some(1.5),
            ..CommandArgs::default()
        };
        assert!(missing.resolve(CommandKind::SolveLinear).is_err());
    }

    #[test]
    fn alpha_range_is_enforced() {
        for bad in [1.0, 2.0, 0.5, 2.5] {
            let args = CommandArgs {
                a: Some(0.0),
                b: Some(1.0),
                alpha: Some(bad),
                q: Some("const:1".into()),
                ..CommandArgs::default()
            };
            assert!(args.resolve(CommandKind::Lyapunov).is_err(), "alpha {bad}");
        }
    }

    #[test]
    fn greens_needs_no_alpha() {
        let args = CommandArgs {
            a: Some(0.0),
            b: Some(2.0),
            ..CommandArgs::default()
        };
        let config = args.resolve(CommandKind::Greens).unwrap();
        assert_eq!(config.alpha, None);
        assert_eq!(config.n, 200);
    }

    #[test]
    fn config_round_trips_through_json() {
        let args = CommandArgs {
            a: Some(0.0),
            b: Some(1.0),
            alpha: Some(1.5),
            y: Some("poly:0,1".into()),
            format: Some("both".into()),
            ..CommandArgs::default()
        };
        let config = args.resolve(CommandKind::SolveLinear).unwrap();
        let json = serde_json::to_string(&config).unwrap();
        let back: RunConfig = serde_json::from_str(&json).unwrap();
        assert_eq!(config, back);
    }
}
