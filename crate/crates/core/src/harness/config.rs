use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::sampling::{Pipeline, RandomStateConfig, ZProfile};

pub const DEFAULT_N: usize = 16;
pub const DEFAULT_N_GRID: [usize; 5] = [16, 32, 64, 128, 256];
pub const DEFAULT_SAMPLES: usize = 5000;
pub const DEFAULT_EPSILON: [f64; 4] = [0.01, 0.05, 0.1, 0.2];
pub const DEFAULT_Z_PROFILE: ZProfile = ZProfile::Uniform(1.5);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::InvalidConfig(format!("unknown format {other:?}"))),
        }
    }
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        })
    }
}

/// Parameters shared by all subcommands. Unset optional fields fall back to
/// per-command defaults.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub n: Option<usize>,
    pub n_grid: Option<Vec<usize>>,
    pub m: usize,
    pub z_profile: ZProfile,
    pub samples: usize,
    pub seed: u64,
    pub epsilon: Vec<f64>,
    pub pipeline: Pipeline,
    pub threads: Option<usize>,
    pub out: Option<PathBuf>,
    pub format: Option<OutputFormat>,
    pub input: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            n: None,
            n_grid: None,
            m: 1,
            z_profile: DEFAULT_Z_PROFILE,
            samples: DEFAULT_SAMPLES,
            seed: 0,
            epsilon: DEFAULT_EPSILON.to_vec(),
            pipeline: Pipeline::Purified,
            threads: None,
            out: None,
            format: None,
            input: None,
        }
    }
}

fn parse_number<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::InvalidConfig(format!("{key}: cannot parse {value:?}")))
}

fn parse_list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse_number(key, s))
        .collect()
}

impl ExperimentConfig {
    /// Sets one parameter from its textual form. Keys match the long flag
    /// names; `_` and `-` are interchangeable.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let key = key.trim().replace('_', "-");
        match key.as_str() {
            "n" => self.n = Some(parse_number(&key, value)?),
            "n-grid" => self.n_grid = Some(parse_list(&key, value)?),
            "m" => self.m = parse_number(&key, value)?,
            "z-profile" => self.z_profile = ZProfile::parse(value)?,
            "samples" => self.samples = parse_number(&key, value)?,
            "seed" => self.seed = parse_number(&key, value)?,
            "epsilon" => self.epsilon = parse_list(&key, value)?,
            "pipeline" => self.pipeline = value.parse()?,
            "threads" => self.threads = Some(parse_number(&key, value)?),
            "out" => self.out = Some(PathBuf::from(value.trim())),
            "format" => self.format = Some(value.parse()?),
            "input" => self.input = Some(PathBuf::from(value.trim())),
            _ => return Err(Error::InvalidConfig(format!("unknown key {key:?}"))),
        }
        Ok(())
    }

    /// Applies a `key=value` file; blank lines and `#` comments are skipped.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::InvalidConfig(format!("line {}: expected key=value, got {line:?}", lineno + 1))
            })?;
            self.set(key, value)?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path)?;
        self.apply_text(&text)
    }

    pub fn n_value(&self) -> usize {
        self.n.unwrap_or(DEFAULT_N)
    }

    pub fn n_grid_value(&self) -> Vec<usize> {
        self.n_grid.clone().unwrap_or_else(|| DEFAULT_N_GRID.to_vec())
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(grid) = &self.n_grid {
            if grid.is_empty() {
                return Err(Error::InvalidConfig("n grid is empty".into()));
            }
            if grid[0] == 0 || grid.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidConfig(format!(
                    "n grid must be positive and strictly increasing, got {grid:?}"
                )));
            }
        }
        if self.n == Some(0) {
            return Err(Error::InvalidConfig("n must be positive".into()));
        }
        if self.m == 0 {
            return Err(Error::InvalidConfig("m must be positive".into()));
        }
        if self.samples == 0 {
            return Err(Error::InvalidConfig("samples must be at least 1".into()));
        }
        if self.epsilon.is_empty() || self.epsilon.iter().any(|e| !(*e > 0.0) || !e.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "epsilon values must be finite and > 0, got {:?}",
                self.epsilon
            )));
        }
        if self.threads == Some(0) {
            return Err(Error::InvalidConfig("threads must be at least 1".into()));
        }
        Ok(())
    }

    pub fn state_config(&self, n_full: usize) -> Result<RandomStateConfig> {
        RandomStateConfig::new(n_full, self.m, self.pipeline, self.z_profile.clone(), self.seed)
    }
}
