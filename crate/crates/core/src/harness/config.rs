//! Experiment configuration: defaults, flat key-value parsing, and
//! validation.

use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::noise::NoiseMode;
use crate::polyutil::{BISECTION_MAX_ITER, BISECTION_TOL};
use crate::relaxation::{EbmModel, ModelError};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("line {line}: expected `key = value`, got {text:?}")]
    Syntax { line: usize, text: String },
    #[error("line {line}: unknown key {key:?}")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: bad value for {key}: {message}")]
    BadValue {
        line: usize,
        key: String,
        message: String,
    },
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Grid description for a reconstruction experiment.
///
/// Defaults follow the reference setup: five unit weights on the rate
/// ladder r_i = 5i, moduli {0.5, 1, 5}, frequency pairs (81, 91),
/// (81, 501), (81, 1001), and noise levels {0, 0.05, 0.1}.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub n: usize,
    pub d_values: Vec<f64>,
    /// Explicit rates; `None` means r_i = 5·i.
    pub rates: Option<Vec<f64>>,
    /// Explicit weights; `None` means b_i = 1.
    pub weights: Option<Vec<f64>>,
    /// Rescale weights by 1/h so the glassy threshold sits at 1.
    pub normalize_h: bool,
    pub k_pairs: Vec<(u32, u32)>,
    pub deltas: Vec<f64>,
    pub seeds: Vec<u64>,
    pub noise_mode: NoiseMode,
    pub out_dir: PathBuf,
    pub bisect_tol: f64,
    pub max_iter: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            n: 5,
            d_values: vec![0.5, 1.0, 5.0],
            rates: None,
            weights: None,
            normalize_h: false,
            k_pairs: vec![(81, 91), (81, 501), (81, 1001)],
            deltas: vec![0.0, 0.05, 0.1],
            seeds: vec![1],
            noise_mode: NoiseMode::AllRoots,
            out_dir: PathBuf::from("out"),
            bisect_tol: BISECTION_TOL,
            max_iter: BISECTION_MAX_ITER,
        }
    }
}

const MAX_FREQUENCY: u32 = 1_000_000;

impl ExperimentConfig {
    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse_str(&text)
    }

    /// Parses the flat `key = value` format. Lists are comma-separated;
    /// frequency pairs use `k1:k2`. `#` starts a comment.
    pub fn parse_str(text: &str) -> Result<Self, ConfigError> {
        let mut config = ExperimentConfig::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| ConfigError::Syntax {
                line,
                text: raw.to_string(),
            })?;
            let key = key.trim();
            let value = value.trim();
            let bad = |message: String| ConfigError::BadValue {
                line,
                key: key.to_string(),
                message,
            };
            match key {
                "n" => config.n = value.parse().map_err(|e| bad(format!("{e}")))?,
                "d_values" => config.d_values = parse_list(value).map_err(bad)?,
                "rates" => config.rates = Some(parse_list(value).map_err(bad)?),
                "weights" => config.weights = Some(parse_list(value).map_err(bad)?),
                "normalize_h" => {
                    config.normalize_h = value.parse().map_err(|e| bad(format!("{e}")))?
                }
                "k_pairs" => config.k_pairs = parse_pairs(value).map_err(bad)?,
                "deltas" => config.deltas = parse_list(value).map_err(bad)?,
                "seeds" => {
                    config.seeds = value
                        .split(',')
                        .map(|s| s.trim().parse::<u64>())
                        .collect::<Result<_, _>>()
                        .map_err(|e| bad(format!("{e}")))?
                }
                "noise_mode" => {
                    config.noise_mode = value.parse().map_err(|e| bad(format!("{e}")))?
                }
                "out_dir" => config.out_dir = PathBuf::from(value),
                "bisect_tol" => {
                    config.bisect_tol = value.parse().map_err(|e| bad(format!("{e}")))?
                }
                "max_iter" => config.max_iter = value.parse().map_err(|e| bad(format!("{e}")))?,
                other => {
                    return Err(ConfigError::UnknownKey {
                        line,
                        key: other.to_string(),
                    })
                }
            }
        }
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.n == 0 {
            return Err(ConfigError::Invalid("n must be at least 1".into()));
        }
        if self.d_values.is_empty() {
            return Err(ConfigError::Invalid("d_values must not be empty".into()));
        }
        if self.k_pairs.is_empty() {
            return Err(ConfigError::Invalid("k_pairs must not be empty".into()));
        }
        for &(k1, k2) in &self.k_pairs {
            if k1 < 1 || k2 > MAX_FREQUENCY {
                return Err(ConfigError::Invalid(format!(
                    "frequency pair ({k1}, {k2}) out of [1, {MAX_FREQUENCY}]"
                )));
            }
            if k1 >= k2 {
                return Err(ConfigError::Invalid(format!(
                    "frequency pair ({k1}, {k2}) must satisfy k1 < k2"
                )));
            }
        }
        if self.deltas.is_empty() {
            return Err(ConfigError::Invalid("deltas must not be empty".into()));
        }
        for &delta in &self.deltas {
            if !(0.0..1.0).contains(&delta) {
                return Err(ConfigError::Invalid(format!(
                    "delta {delta} outside [0, 1)"
                )));
            }
        }
        if self.seeds.is_empty() {
            return Err(ConfigError::Invalid("seeds must not be empty".into()));
        }
        if !self.bisect_tol.is_finite() || self.bisect_tol <= 0.0 {
            return Err(ConfigError::Invalid("bisect_tol must be positive".into()));
        }
        if let Some(rates) = &self.rates {
            if rates.len() != self.n {
                return Err(ConfigError::Invalid(format!(
                    "{} rates given for n = {}",
                    rates.len(),
                    self.n
                )));
            }
        }
        if let Some(weights) = &self.weights {
            if weights.len() != self.n {
                return Err(ConfigError::Invalid(format!(
                    "{} weights given for n = {}",
                    weights.len(),
                    self.n
                )));
            }
        }
        // a throwaway model surfaces rate/weight violations early
        self.model_for(self.d_values[0])?;
        Ok(())
    }

    pub fn effective_rates(&self) -> Vec<f64> {
        self.rates
            .clone()
            .unwrap_or_else(|| (1..=self.n).map(|i| 5.0 * i as f64).collect())
    }

    pub fn effective_weights(&self) -> Vec<f64> {
        self.weights.clone().unwrap_or_else(|| vec![1.0; self.n])
    }

    /// The target model at modulus `d`, honoring `normalize_h`.
    pub fn model_for(&self, d: f64) -> Result<EbmModel, ModelError> {
        let model = EbmModel::new(d, self.effective_weights(), self.effective_rates())?;
        Ok(if self.normalize_h {
            model.normalized_h()
        } else {
            model
        })
    }
}

fn parse_list(value: &str) -> Result<Vec<f64>, String> {
    value
        .split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|e| e.to_string()))
        .collect()
}

fn parse_pairs(value: &str) -> Result<Vec<(u32, u32)>, String> {
    value
        .split(',')
        .map(|s| {
            let (a, b) = s
                .trim()
                .split_once(':')
                .ok_or_else(|| format!("expected k1:k2, got {s:?}"))?;
            let k1 = a.trim().parse::<u32>().map_err(|e| e.to_string())?;
            let k2 = b.trim().parse::<u32>().map_err(|e| e.to_string())?;
            Ok((k1, k2))
        })
        .collect()
}
