//! Subcommand implementations behind the `aoristic` binary.

use std::path::PathBuf;

use serde::Serialize;
use serde_json::json;

use crate::config::{PriorSamplerKind, RunConfig};
use crate::error::{Error, Result};
use crate::estimate::{fit_forward, prior_loglik_curve, CurveConfig, ForwardFit, PriorFitCurve, PriorTheta};
use crate::io::{observed_to_csv, table_to_csv, write_file};
use crate::marks::MarkLaw;
use crate::posterior::{mh_state_estimation, ObservedData, PosteriorSample};
use crate::prior::{sample_prior_bdmh, sample_prior_cftp};
use crate::stats::histogram;
use crate::validation::{run_criteria, CriterionReport, DEFAULT_VALIDATION_SEED};
use crate::{derive_seed, seeded_rng};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_DATA: i32 = 3;
pub const EXIT_NUMERIC: i32 = 4;
pub const EXIT_VALIDATION: i32 = 5;

/// Process exit code for an error.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config(_) | Error::InvalidParameter(_) | Error::DistributionParameter(_) => EXIT_CONFIG,
        Error::Parse { .. }
        | Error::OutsideWindow { .. }
        | Error::EmptyData
        | Error::Inconsistent(_)
        | Error::Io(_)
        | Error::Domain { .. }
        | Error::OutOfRange { .. }
        | Error::TooLarge { .. } => EXIT_DATA,
        Error::Numeric(_) | Error::Model(_) | Error::NonCoalescence { .. } | Error::Initialisation { .. } => {
            EXIT_NUMERIC
        }
    }
}

fn meta(cfg: &RunConfig, seed: u64) -> Vec<(String, String)> {
    vec![
        ("seed".to_string(), seed.to_string()),
        ("config".to_string(), cfg.to_json()),
    ]
}

#[derive(Debug, Clone)]
pub struct SimulateOutput {
    pub seed: u64,
    pub truth: Vec<f64>,
    pub observed: ObservedData,
    pub truth_path: PathBuf,
    pub observed_path: PathBuf,
}

/// Simulates latent times from the prior, marks them and writes
/// `truth.csv` and `observed.csv`.
pub fn cmd_simulate(cfg: &mut RunConfig) -> Result<SimulateOutput> {
    cfg.validate()?;
    let seed = cfg.resolve_seed();
    let prior = cfg.prior()?;
    let window = prior.window;
    let pattern = match cfg.prior_sampler {
        PriorSamplerKind::Cftp => sample_prior_cftp(&prior, derive_seed(seed, 0))?,
        PriorSamplerKind::Bdmh => sample_prior_bdmh(&prior, cfg.bdmh_sweeps.max(1), derive_seed(seed, 0))?,
    };
    let law = MarkLaw::new(cfg.p, cfg.phase()?)?;
    let mut rng = seeded_rng(derive_seed(seed, 1));
    let mut atoms = Vec::new();
    let mut intervals = Vec::new();
    for &t in pattern.points() {
        let m = law.sample(&mut rng)?.at(t);
        if m.is_atom() {
            atoms.push(m.a);
        } else {
            intervals.push(m);
        }
    }
    let observed = ObservedData::new(atoms, intervals, window)?;
    let meta = meta(cfg, seed);
    let truth_path = cfg.out.join("truth.csv");
    let observed_path = cfg.out.join("observed.csv");
    write_file(
        &truth_path,
        &table_to_csv(&["t"], pattern.points().iter().map(|&t| vec![t]), &meta),
    )?;
    write_file(&observed_path, &observed_to_csv(&observed, &meta))?;
    Ok(SimulateOutput {
        seed,
        truth: pattern.into_points(),
        observed,
        truth_path,
        observed_path,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct PosteriorSummary {
    pub seed: u64,
    pub n: usize,
    pub m: usize,
    pub acceptance_rate: f64,
    pub proposals: u64,
    pub accepted: u64,
    pub snapshots: usize,
    pub means: Vec<f64>,
    pub note: Option<String>,
    pub config: RunConfig,
}

/// Runs the posterior sampler and writes `chain.csv`, `histogram.csv` and
/// `summary.json`.
pub fn cmd_posterior(cfg: &mut RunConfig, data: &ObservedData) -> Result<(PosteriorSummary, PosteriorSample)> {
    cfg.validate()?;
    let seed = cfg.resolve_seed();
    let prior = crate::prior::AreaInteraction::new(cfg.beta, cfg.eta, cfg.r, data.window())?;
    let sample = mh_state_estimation(data, &prior, &cfg.mcmc(), seed)?;
    let meta = meta(cfg, seed);
    let k = sample.dim();

    let header: Vec<String> = (1..=k).map(|i| format!("x{i}")).collect();
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    write_file(
        &cfg.out.join("chain.csv"),
        &table_to_csv(&header_refs, sample.states().map(|s| s.to_vec()), &meta),
    )?;

    let bins = cfg.histogram_bins;
    let mut rows = Vec::new();
    let mut means = Vec::with_capacity(k);
    for j in 0..k {
        let xs = sample.coordinate(j);
        let (lo, hi) = data.support(j);
        let counts = histogram(&xs, lo, hi, bins);
        let width = (hi - lo) / bins as f64;
        let total = xs.len().max(1) as f64;
        for (b, &c) in counts.iter().enumerate() {
            let blo = lo + b as f64 * width;
            rows.push(vec![
                (j + 1) as f64,
                blo,
                blo + width,
                c as f64,
                c as f64 / (total * width),
            ]);
        }
        means.push(xs.iter().sum::<f64>() / total);
    }
    write_file(
        &cfg.out.join("histogram.csv"),
        &table_to_csv(&["interval", "bin_lo", "bin_hi", "count", "density"], rows, &meta),
    )?;

    let summary = PosteriorSummary {
        seed,
        n: data.n(),
        m: data.m(),
        acceptance_rate: sample.acceptance_rate(),
        proposals: sample.proposals,
        accepted: sample.accepted,
        snapshots: sample.len(),
        means,
        note: (k == 0).then(|| "all observations are atoms; no simulation needed".to_string()),
        config: cfg.clone(),
    };
    write_file(
        &cfg.out.join("summary.json"),
        &serde_json::to_string_pretty(&summary).expect("summary serialises"),
    )?;
    Ok((summary, sample))
}

#[derive(Debug, Clone, Serialize)]
pub struct FitOutput {
    pub seed: u64,
    pub forward: ForwardFit,
    pub curve: Option<PriorFitCurve>,
}

/// Fits the forward model and, when a grid is configured, the prior curve.
/// Writes `fit.json` and optionally `curve.csv`.
pub fn cmd_fit(cfg: &mut RunConfig, data: &ObservedData) -> Result<FitOutput> {
    cfg.validate()?;
    let seed = cfg.resolve_seed();
    let forward = fit_forward(data)?;
    let curve = if cfg.theta_grid.is_empty() {
        None
    } else {
        let reference = crate::prior::AreaInteraction::new(cfg.beta, cfg.eta, cfg.r, data.window())?;
        let curve_cfg = CurveConfig {
            mcmc: cfg.mcmc(),
            prior_samples: cfg.prior_samples,
            prior_sampler: cfg.curve_sampler(),
            ess_floor: cfg.ess_floor,
            ..CurveConfig::default()
        };
        Some(prior_loglik_curve(data, &cfg.theta_grid, cfg.theta, &reference, &curve_cfg, seed)?)
    };
    let meta = meta(cfg, seed);
    if let Some(c) = &curve {
        let rows = c
            .theta_grid
            .iter()
            .zip(&c.l_values)
            .zip(&c.mc_error)
            .map(|((&t, &l), &e)| vec![t, l, e]);
        let name = match c.theta {
            PriorTheta::Eta => "eta",
            PriorTheta::Beta => "beta",
        };
        write_file(&cfg.out.join("curve.csv"), &table_to_csv(&[name, "log_rel_lik", "mc_error"], rows, &meta))?;
    }
    let out = FitOutput { seed, forward, curve };
    let doc = json!({
        "seed": seed,
        "forward": out.forward,
        "prior_curve": out.curve,
        "config": cfg,
    });
    write_file(&cfg.out.join("fit.json"), &serde_json::to_string_pretty(&doc).expect("fit serialises"))?;
    Ok(out)
}

/// Runs the selected validation criteria (all when `only` is empty).
pub fn cmd_validate(cfg: &mut RunConfig, only: &[u32]) -> Result<Vec<CriterionReport>> {
    let seed = cfg.seed.unwrap_or(DEFAULT_VALIDATION_SEED);
    run_criteria(only, seed)
}
