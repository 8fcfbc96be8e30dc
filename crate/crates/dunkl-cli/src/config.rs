//! Scenario configuration: a flat key=value file with command-line
//! overrides. Unknown keys are hard errors so typos cannot silently fall
//! back to defaults.

use std::fmt;
use std::path::PathBuf;

use serde::Serialize;

use dunkl::besov::{BesovIndex, QExponent};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Log,
    Linear,
}

impl fmt::Display for Spacing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Spacing::Log => write!(f, "log"),
            Spacing::Linear => write!(f, "linear"),
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub count: usize,
    pub spacing: Spacing,
}

impl GridSpec {
    pub fn points(&self) -> Vec<f64> {
        let n = self.count;
        if n == 1 {
            return vec![self.min];
        }
        (0..n)
            .map(|i| {
                let frac = i as f64 / (n - 1) as f64;
                match self.spacing {
                    Spacing::Log => self.min * (self.max / self.min).powf(frac),
                    Spacing::Linear => self.min + (self.max - self.min) * frac,
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
}

/// Fully resolved scenario: defaults, then the config file, then flags.
#[derive(Debug, Clone, Serialize)]
pub struct ScenarioConfig {
    pub alpha: f64,
    pub k: usize,
    pub p: f64,
    /// Secondary exponent as written ("2", "inf", ...).
    pub q: String,
    pub beta: f64,
    pub function: String,
    pub grid: GridSpec,
    pub tol: f64,
    pub spread: f64,
    pub format: OutputFormat,
    pub seed: u64,
    /// Destination is plumbing, not scenario: skipped in the report echo so
    /// identical scenarios produce identical bytes wherever they land.
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            alpha: 0.5,
            k: 1,
            p: 2.0,
            q: "2".into(),
            beta: 0.5,
            function: "gaussian(1.0)".into(),
            grid: GridSpec {
                min: 0.05,
                max: 5.0,
                count: 32,
                spacing: Spacing::Log,
            },
            tol: 1e-7,
            spread: 50.0,
            format: OutputFormat::Json,
            seed: 0,
            out: None,
        }
    }
}

/// Configuration-stage failure; always maps to exit code 2.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for ConfigError {}

fn parse_num<T: std::str::FromStr>(field: &str, value: &str) -> Result<T, ConfigError> {
    value
        .trim()
        .parse()
        .map_err(|_| ConfigError(format!("field '{field}': cannot parse '{value}'")))
}

impl ScenarioConfig {
    fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        match key {
            "alpha" => self.alpha = parse_num("alpha", value)?,
            "k" => self.k = parse_num("k", value)?,
            "p" => self.p = parse_num("p", value)?,
            "q" => self.q = value.trim().to_string(),
            "beta" => self.beta = parse_num("beta", value)?,
            "function" => self.function = value.trim().to_string(),
            "grid.min" => self.grid.min = parse_num("grid.min", value)?,
            "grid.max" => self.grid.max = parse_num("grid.max", value)?,
            "grid.count" => self.grid.count = parse_num("grid.count", value)?,
            "grid.spacing" => {
                self.grid.spacing = match value.trim() {
                    "log" => Spacing::Log,
                    "linear" => Spacing::Linear,
                    other => {
                        return Err(ConfigError(format!(
                            "field 'grid.spacing': expected log or linear, got '{other}'"
                        )))
                    }
                }
            }
            "tol" => self.tol = parse_num("tol", value)?,
            "spread" => self.spread = parse_num("spread", value)?,
            "format" => {
                self.format = match value.trim() {
                    "json" => OutputFormat::Json,
                    "csv" => OutputFormat::Csv,
                    other => {
                        return Err(ConfigError(format!(
                            "field 'format': expected json or csv, got '{other}'"
                        )))
                    }
                }
            }
            "seed" => self.seed = parse_num("seed", value)?,
            "out" => self.out = Some(PathBuf::from(value.trim())),
            other => return Err(ConfigError(format!("unknown key '{other}'"))),
        }
        Ok(())
    }

    pub fn apply_file(&mut self, text: &str, path: &std::path::Path) -> Result<(), ConfigError> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                ConfigError(format!(
                    "{}:{}: expected key = value, got '{line}'",
                    path.display(),
                    lineno + 1
                ))
            })?;
            self.set(key.trim(), value).map_err(|e| {
                ConfigError(format!("{}:{}: {}", path.display(), lineno + 1, e.0))
            })?;
        }
        Ok(())
    }

    pub fn set_format(&mut self, value: &str) -> Result<(), ConfigError> {
        self.set("format", value)
    }

    /// --grid as min:max:count:spacing.
    pub fn apply_grid_flag(&mut self, text: &str) -> Result<(), ConfigError> {
        let parts: Vec<&str> = text.split(':').collect();
        if parts.len() != 4 {
            return Err(ConfigError(format!(
                "--grid expects min:max:count:spacing, got '{text}'"
            )));
        }
        self.set("grid.min", parts[0])?;
        self.set("grid.max", parts[1])?;
        self.set("grid.count", parts[2])?;
        self.set("grid.spacing", parts[3])?;
        Ok(())
    }

    pub fn q_exponent(&self) -> Result<QExponent, ConfigError> {
        match self.q.as_str() {
            "inf" | "infinity" | "Infinity" => Ok(QExponent::Infinity),
            other => Ok(QExponent::Finite(parse_num::<f64>("q", other)?)),
        }
    }

    pub fn besov_index(&self) -> Result<BesovIndex, ConfigError> {
        Ok(BesovIndex {
            beta: self.beta,
            p: self.p,
            q: self.q_exponent()?,
            k: self.k,
        })
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.grid.min > 0.0) {
            return Err(ConfigError(format!(
                "field 'grid.min': must be positive, got {}",
                self.grid.min
            )));
        }
        if !(self.grid.max > self.grid.min) {
            return Err(ConfigError(format!(
                "field 'grid.max': must exceed grid.min, got {}",
                self.grid.max
            )));
        }
        if self.grid.count == 0 || self.grid.count > 100_000 {
            return Err(ConfigError(format!(
                "field 'grid.count': must be in 1..=100000, got {}",
                self.grid.count
            )));
        }
        if self.k == 0 {
            return Err(ConfigError("field 'k': must be at least 1".into()));
        }
        if !(self.tol > 0.0) {
            return Err(ConfigError(format!(
                "field 'tol': must be positive, got {}",
                self.tol
            )));
        }
        if !(self.spread >= 1.0) {
            return Err(ConfigError(format!(
                "field 'spread': must be at least 1, got {}",
                self.spread
            )));
        }
        Ok(())
    }
}
