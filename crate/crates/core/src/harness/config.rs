//! Experiment configuration: a TOML file whose keys mirror the CLI flags,
//! with flags taking precedence. Every value goes through the same textual
//! parser whether it came from the file or the command line.

use std::collections::HashSet;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::benchmarks::make_problem;
use crate::error::{Error, Result};
use crate::repelling::{RepellingConfig, DEFAULT_GAMMA};
use crate::restart::StrategyKind;

/// Keys accepted in a config file and, with a `--` prefix, on the command line.
pub const KEYS: &[&str] = &[
    "problem",
    "dim",
    "instances",
    "strategy",
    "repelling",
    "coverage-c",
    "gamma",
    "sigma0",
    "budget",
    "runs",
    "seed",
    "out",
];

pub const DEFAULT_RUNS: usize = 50;
pub const BUDGET_PER_DIM: usize = 10_000;
pub const MAX_DIM: usize = 1000;
pub const MAX_INDICES: usize = 100_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub problems: Vec<String>,
    pub dims: Vec<usize>,
    pub instances: Vec<u64>,
    pub strategies: Vec<StrategyKind>,
    pub repelling: bool,
    pub coverage: Vec<f64>,
    pub gamma: f64,
    /// `None` means a fifth of the mean box width.
    pub sigma0: Option<f64>,
    /// `None` means `10⁴ · d`.
    pub budget: Option<usize>,
    pub runs: usize,
    pub seed: u64,
    pub out: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            problems: vec!["himmelblau".into()],
            dims: vec![2],
            instances: vec![0],
            strategies: vec![StrategyKind::Naive],
            repelling: false,
            coverage: vec![2.0],
            gamma: DEFAULT_GAMMA,
            sigma0: None,
            budget: None,
            runs: DEFAULT_RUNS,
            seed: 0,
            out: PathBuf::from("out"),
        }
    }
}

impl ExperimentConfig {
    /// Parses `value` for `key` and stores it.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key {
            "problem" => self.problems = parse_list(key, value, |s| Ok(s.to_string()))?,
            "dim" => self.dims = parse_list(key, value, |s| parse_num::<usize>(key, s))?,
            "instances" => self.instances = parse_index_list(value)?,
            "strategy" => self.strategies = parse_list(key, value, |s| s.parse())?,
            "repelling" => self.repelling = parse_bool(key, value)?,
            "coverage-c" => self.coverage = parse_list(key, value, |s| parse_num::<f64>(key, s))?,
            "gamma" => self.gamma = parse_num(key, value)?,
            "sigma0" => self.sigma0 = Some(parse_num(key, value)?),
            "budget" => self.budget = Some(parse_num(key, value)?),
            "runs" => self.runs = parse_num(key, value)?,
            "seed" => self.seed = parse_num(key, value)?,
            "out" => {
                if value.is_empty() {
                    return Err(Error::config(key, "empty path"));
                }
                self.out = PathBuf::from(value);
            }
            _ => return Err(Error::config(key, "unknown key")),
        }
        Ok(())
    }

    /// Applies a config file, then the command-line overrides, then validates.
    pub fn resolve(file: Option<&str>, overrides: &[(String, String)]) -> Result<Self> {
        let mut cfg = ExperimentConfig::default();
        if let Some(text) = file {
            for (k, v) in parse_config_str(text)? {
                cfg.set(&k, &v)?;
            }
        }
        for (k, v) in overrides {
            cfg.set(k, v)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.dims.iter().any(|&d| d == 0 || d > MAX_DIM) {
            return Err(Error::config("dim", format!("dimensions must lie in 1..={MAX_DIM}")));
        }
        if self.runs == 0 {
            return Err(Error::config("runs", "must be at least 1"));
        }
        if self.budget == Some(0) {
            return Err(Error::config("budget", "must be at least 1"));
        }
        if let Some(s) = self.sigma0 {
            if !(s > 0.0) || !s.is_finite() {
                return Err(Error::config("sigma0", format!("must be positive, got {s}")));
            }
        }
        if self.repelling {
            for &c in &self.coverage {
                RepellingConfig::new(c, self.gamma, 1.0)?;
            }
        } else if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return Err(Error::config("gamma", format!("must lie in (0, 1), got {}", self.gamma)));
        }
        for name in &self.problems {
            for &d in &self.dims {
                make_problem(name, d, 0)?;
            }
        }
        Ok(())
    }

    pub fn budget_for(&self, dim: usize) -> usize {
        self.budget.unwrap_or(BUDGET_PER_DIM * dim)
    }

    /// Repelling variants to run: `None` is the plain restart scheme.
    pub fn variants(&self) -> Vec<Option<f64>> {
        if self.repelling {
            self.coverage.iter().map(|&c| Some(c)).collect()
        } else {
            vec![None]
        }
    }
}

/// Label of a strategy/variant pair, e.g. `restart` or `ipop-rr-c10`.
pub fn strategy_label(kind: StrategyKind, coverage: Option<f64>) -> String {
    match coverage {
        Some(c) => format!("{}-rr-c{}", kind.as_str(), c),
        None => kind.as_str().to_string(),
    }
}

/// Flattens a TOML document into `(key, value)` pairs. Arrays become
/// comma-separated lists so that they parse like the CLI syntax.
pub fn parse_config_str(text: &str) -> Result<Vec<(String, String)>> {
    let table: toml::Table = text
        .parse()
        .map_err(|e: toml::de::Error| Error::config("config", e.message().to_string()))?;
    let mut out = Vec::with_capacity(table.len());
    for (key, value) in table {
        if !KEYS.contains(&key.as_str()) {
            return Err(Error::config(key, "unknown key"));
        }
        let text = match &value {
            toml::Value::Array(items) => items
                .iter()
                .map(|v| scalar_text(&key, v))
                .collect::<Result<Vec<_>>>()?
                .join(","),
            v => scalar_text(&key, v)?,
        };
        out.push((key, text));
    }
    Ok(out)
}

fn scalar_text(key: &str, v: &toml::Value) -> Result<String> {
    match v {
        toml::Value::String(s) => Ok(s.clone()),
        toml::Value::Integer(i) => Ok(i.to_string()),
        toml::Value::Float(f) => Ok(f.to_string()),
        toml::Value::Boolean(b) => Ok(b.to_string()),
        _ => Err(Error::config(key, "expected a string, number, boolean or array of those")),
    }
}

/// Parses `"0-9,12"` style lists: comma-separated indices and inclusive
/// ranges. Order is kept and duplicates are dropped.
pub fn parse_index_list(text: &str) -> Result<Vec<u64>> {
    let mut out: Vec<u64> = Vec::new();
    let mut seen = HashSet::new();
    for part in text.split(',') {
        let part = part.trim();
        if part.is_empty() {
            return Err(Error::config("instances", format!("empty entry in `{text}`")));
        }
        let (lo, hi) = match part.split_once('-') {
            Some((a, b)) => (parse_num::<u64>("instances", a)?, parse_num::<u64>("instances", b)?),
            None => {
                let v = parse_num::<u64>("instances", part)?;
                (v, v)
            }
        };
        if lo > hi {
            return Err(Error::config("instances", format!("descending range `{part}`")));
        }
        if hi - lo >= MAX_INDICES as u64 {
            return Err(Error::config("instances", format!("range `{part}` is too large")));
        }
        out.extend((lo..=hi).filter(|i| seen.insert(*i)));
        if out.len() > MAX_INDICES {
            return Err(Error::config("instances", format!("more than {MAX_INDICES} indices")));
        }
    }
    Ok(out)
}

fn parse_list<T>(key: &str, text: &str, item: impl Fn(&str) -> Result<T>) -> Result<Vec<T>> {
    let items: Vec<T> = text
        .split(',')
        .map(str::trim)
        .map(|s| {
            if s.is_empty() {
                Err(Error::config(key, format!("empty entry in `{text}`")))
            } else {
                item(s)
            }
        })
        .collect::<Result<_>>()?;
    Ok(items)
}

fn parse_num<T: std::str::FromStr>(key: &str, text: &str) -> Result<T> {
    text.trim()
        .parse()
        .map_err(|_| Error::config(key, format!("cannot parse `{}`", text.trim())))
}

fn parse_bool(key: &str, text: &str) -> Result<bool> {
    match text {
        "true" | "on" | "yes" | "1" => Ok(true),
        "false" | "off" | "no" | "0" => Ok(false),
        _ => Err(Error::config(key, format!("expected a boolean, got `{text}`"))),
    }
}
