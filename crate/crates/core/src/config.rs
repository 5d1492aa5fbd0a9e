//! Run configuration: model and sampler parameters shared by the
//! subcommands. Loaded from JSON or `key=value` files; command-line flags
//! override file values.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimate::{PriorSampler, PriorTheta};
use crate::phase::PhaseDist;
use crate::posterior::MhConfig;
use crate::prior::{AreaInteraction, Window};

/// Environment variable naming a default configuration file.
pub const DEFAULT_CONFIG_ENV: &str = "AORISTIC_CONFIG";

/// How the `lambda` parameter of the Y-phase Gamma law is read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LambdaMeaning {
    Rate,
    Scale,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PriorSamplerKind {
    Cftp,
    Bdmh,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub beta: f64,
    pub eta: f64,
    pub r: f64,
    pub window_lo: f64,
    pub window_hi: f64,
    /// Whether the window of ingested data comes from the config (true) or
    /// from the file / inferred hull (false).
    pub window_from_config: bool,
    pub k: f64,
    pub lambda: f64,
    pub lambda_meaning: LambdaMeaning,
    pub p: f64,
    pub burnin: usize,
    pub sweeps: usize,
    pub thin: usize,
    pub seed: Option<u64>,
    pub prior_sampler: PriorSamplerKind,
    /// Sweeps of the birth–death sampler when simulating from the prior.
    pub bdmh_sweeps: usize,
    pub histogram_bins: usize,
    pub theta: PriorTheta,
    /// Grid for the prior log relative likelihood curve; empty disables it.
    pub theta_grid: Vec<f64>,
    pub prior_samples: usize,
    pub ess_floor: f64,
    pub out: PathBuf,
    pub threads: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            beta: 12.0,
            eta: 0.0,
            r: 0.05,
            window_lo: 0.0,
            window_hi: 1.0,
            window_from_config: false,
            k: 2.5,
            lambda: 0.07,
            lambda_meaning: LambdaMeaning::Rate,
            p: 0.2,
            burnin: 10_000,
            sweeps: 100_000,
            thin: 1,
            seed: None,
            prior_sampler: PriorSamplerKind::Cftp,
            bdmh_sweeps: 1_000,
            histogram_bins: 50,
            theta: PriorTheta::Eta,
            theta_grid: Vec::new(),
            prior_samples: 100_000,
            ess_floor: 100.0,
            out: PathBuf::from("out"),
            threads: None,
        }
    }
}

impl RunConfig {
    /// Loads a JSON object or `key=value` lines.
    pub fn from_text(text: &str) -> Result<Self> {
        if text.trim_start().starts_with('{') {
            return serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()));
        }
        let mut cfg = RunConfig::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key=value", i + 1)))?;
            cfg.set(k.trim(), v.trim())
                .map_err(|e| Error::Config(format!("line {}: {e}", i + 1)))?;
        }
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        RunConfig::from_text(&text)
    }

    /// Sets one field from its string form.
    pub fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        fn num<T: std::str::FromStr>(key: &str, v: &str) -> std::result::Result<T, String> {
            v.parse().map_err(|_| format!("invalid value '{v}' for {key}"))
        }
        match key {
            "beta" => self.beta = num(key, value)?,
            "eta" => self.eta = num(key, value)?,
            "r" => self.r = num(key, value)?,
            "window_lo" => self.window_lo = num(key, value)?,
            "window_hi" => self.window_hi = num(key, value)?,
            "window_from_config" => self.window_from_config = num(key, value)?,
            "k" => self.k = num(key, value)?,
            "lambda" => self.lambda = num(key, value)?,
            "lambda_meaning" => {
                self.lambda_meaning = match value {
                    "rate" => LambdaMeaning::Rate,
                    "scale" => LambdaMeaning::Scale,
                    _ => return Err(format!("invalid value '{value}' for {key}")),
                }
            }
            "p" => self.p = num(key, value)?,
            "burnin" => self.burnin = num(key, value)?,
            "sweeps" => self.sweeps = num(key, value)?,
            "thin" => self.thin = num(key, value)?,
            "seed" => self.seed = Some(num(key, value)?),
            "prior_sampler" => {
                self.prior_sampler = match value {
                    "cftp" => PriorSamplerKind::Cftp,
                    "bdmh" => PriorSamplerKind::Bdmh,
                    _ => return Err(format!("invalid value '{value}' for {key}")),
                }
            }
            "bdmh_sweeps" => self.bdmh_sweeps = num(key, value)?,
            "histogram_bins" => self.histogram_bins = num(key, value)?,
            "theta" => {
                self.theta = match value {
                    "eta" => PriorTheta::Eta,
                    "beta" => PriorTheta::Beta,
                    _ => return Err(format!("invalid value '{value}' for {key}")),
                }
            }
            "theta_grid" => {
                self.theta_grid = value
                    .split(',')
                    .filter(|s| !s.trim().is_empty())
                    .map(|s| num(key, s.trim()))
                    .collect::<std::result::Result<_, _>>()?
            }
            "prior_samples" => self.prior_samples = num(key, value)?,
            "ess_floor" => self.ess_floor = num(key, value)?,
            "out" => self.out = PathBuf::from(value),
            "threads" => self.threads = Some(num(key, value)?),
            _ => return Err(format!("unknown key '{key}'")),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        self.window()?;
        self.prior()?;
        self.phase()?;
        if !(0.0..=1.0).contains(&self.p) {
            return Err(Error::Config(format!("p = {} not in [0, 1]", self.p)));
        }
        if self.thin == 0 {
            return Err(Error::Config("thin must be at least 1".into()));
        }
        if self.histogram_bins == 0 {
            return Err(Error::Config("histogram_bins must be at least 1".into()));
        }
        Ok(())
    }

    pub fn window(&self) -> Result<Window> {
        Window::new(self.window_lo, self.window_hi).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn prior(&self) -> Result<AreaInteraction> {
        AreaInteraction::new(self.beta, self.eta, self.r, self.window()?)
            .map_err(|e| Error::Config(e.to_string()))
    }

    /// Y-phase law Gamma(k, λ), reading `lambda` as configured.
    pub fn phase(&self) -> Result<PhaseDist> {
        let rate = match self.lambda_meaning {
            LambdaMeaning::Rate => self.lambda,
            LambdaMeaning::Scale => 1.0 / self.lambda,
        };
        PhaseDist::gamma(self.k, rate).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn mcmc(&self) -> MhConfig {
        MhConfig {
            burnin: self.burnin,
            sweeps: self.sweeps,
            thin: self.thin,
            ..MhConfig::default()
        }
    }

    pub fn curve_sampler(&self) -> PriorSampler {
        match self.prior_sampler {
            PriorSamplerKind::Cftp => PriorSampler::Cftp,
            PriorSamplerKind::Bdmh => PriorSampler::BirthDeath {
                burnin_sweeps: self.bdmh_sweeps,
                thin_sweeps: 1,
            },
        }
    }

    /// Seed to use; a missing seed is generated from the clock and stored so
    /// it can be echoed.
    pub fn resolve_seed(&mut self) -> u64 {
        *self.seed.get_or_insert_with(|| {
            std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_nanos() as u64)
                .unwrap_or(0)
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("config serialises")
    }
}
