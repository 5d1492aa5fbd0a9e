//! Parameter estimation.
//!
//! Forward-model parameters (atom probability and the Y-phase law) are fitted
//! by maximum likelihood. Prior parameters are compared through a Monte Carlo
//! estimate of the log relative likelihood against a reference value, which
//! needs one sample from the posterior and one from the prior, both at the
//! reference value.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::digamma;

use crate::error::{Error, Result};
use crate::phase::PhaseDist;
use crate::posterior::{mh_state_estimation, MhConfig, ObservedData};
use crate::prior::{covered_length_sorted, sample_prior_cftp, AreaInteraction, BirthDeathChain};
use crate::renewal::RenewalSpec;
use crate::derive_seed;

const GAMMA_MAX_ITER: usize = 100;

/// Fraction of atoms, `m / n`.
pub fn estimate_atom_prob(u: &ObservedData) -> Result<f64> {
    if u.n() == 0 {
        return Err(Error::EmptyData);
    }
    Ok(u.m() as f64 / u.n() as f64)
}

/// Trigamma via recurrence and the asymptotic series.
pub(crate) fn trigamma(mut x: f64) -> f64 {
    let mut acc = 0.0;
    while x < 10.0 {
        acc += 1.0 / (x * x);
        x += 1.0;
    }
    let x2 = 1.0 / (x * x);
    acc + 1.0 / x
        + x2 / 2.0
        + x2 / x * (1.0 / 6.0 - x2 * (1.0 / 30.0 - x2 * (1.0 / 42.0 - x2 * (1.0 / 30.0 - x2 * 5.0 / 66.0))))
}

/// Maximum likelihood Gamma fit (shape, rate).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaMle {
    pub shape: f64,
    pub rate: f64,
    pub shape_se: f64,
    pub rate_se: f64,
    /// `ln k - ψ(k) - s` at the returned shape.
    pub residual: f64,
    pub iterations: usize,
}

/// Gamma maximum likelihood on the raw sample: Newton on
/// `ln k - ψ(k) = ln(mean) - mean(ln x)` from the moment estimate, with the
/// rate profiled out as `k / mean`.
pub fn gamma_mle(xs: &[f64]) -> Result<GammaMle> {
    if xs.len() < 2 {
        return Err(Error::InvalidParameter("need at least two lengths".into()));
    }
    if let Some(&x) = xs.iter().find(|&&x| !(x > 0.0 && x.is_finite())) {
        return Err(Error::Domain {
            what: "lengths must be positive",
            value: x,
        });
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let mean_log = xs.iter().map(|x| x.ln()).sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let s = mean.ln() - mean_log;
    let mut k = mean * mean / var;
    if !(s > 0.0 && k.is_finite() && k > 0.0) {
        return Err(Error::Numeric(format!(
            "degenerate sample (log-mean gap {s:e}, moment shape {k}); Newton iteration cannot start"
        )));
    }
    let g = |k: f64| k.ln() - digamma(k) - s;
    let mut iterations = 0;
    let mut converged = false;
    while iterations < GAMMA_MAX_ITER {
        iterations += 1;
        let gk = g(k);
        let dg = 1.0 / k - trigamma(k);
        let mut next = k - gk / dg;
        if !(next > 0.0) {
            next = k / 2.0;
        }
        let done = (next - k).abs() <= 1e-14 * k;
        k = next;
        if done || g(k).abs() < 1e-13 {
            converged = true;
            break;
        }
    }
    let residual = g(k);
    if !converged || !residual.is_finite() || !k.is_finite() {
        return Err(Error::Numeric(format!(
            "gamma shape iteration did not converge after {iterations} steps"
        )));
    }
    let rate = k / mean;
    // Inverse observed information for (shape, rate).
    let a = n * trigamma(k);
    let b = -n / rate;
    let c = n * k / (rate * rate);
    let det = a * c - b * b;
    Ok(GammaMle {
        shape: k,
        rate,
        shape_se: (c / det).sqrt(),
        rate_se: (a / det).sqrt(),
        residual,
        iterations,
    })
}

/// Fit of the Y-phase Gamma(k, λ) law from observed interval lengths, which
/// follow Gamma(k + 1, λ). Returns `(k̂, λ̂)` with standard errors.
pub fn fit_gamma_lengths(lengths: &[f64]) -> Result<GammaMle> {
    let fit = gamma_mle(lengths)?;
    if fit.shape <= 1.0 {
        return Err(Error::Model(format!(
            "length-biased shape {} must exceed 1",
            fit.shape
        )));
    }
    Ok(GammaMle {
        shape: fit.shape - 1.0,
        ..fit
    })
}

/// `m log p + (n-m) log(1-p) + Σ log(f_Y(l_i) / E[Y])` with `0 log 0 = 0`.
pub fn forward_loglik(u: &ObservedData, p: f64, f_y: &PhaseDist) -> f64 {
    let m = u.m() as f64;
    let k = u.k() as f64;
    let term = |count: f64, prob: f64| {
        if count == 0.0 {
            0.0
        } else if prob <= 0.0 {
            f64::NEG_INFINITY
        } else {
            count * prob.ln()
        }
    };
    let mean_y = f_y.mean();
    let intervals: f64 = u.intervals().iter().map(|iv| f_y.ln_pdf(iv.l) - mean_y.ln()).sum();
    term(m, p) + term(k, 1.0 - p) + intervals
}

/// Forward log likelihood with the mixture weight `E[Z]/E[T]` taken from a
/// full renewal specification.
pub fn forward_loglik_renewal(u: &ObservedData, spec: &RenewalSpec) -> f64 {
    forward_loglik(u, spec.atom_probability(), &spec.y)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForwardFit {
    pub n: usize,
    pub m: usize,
    pub p_hat: f64,
    /// Y-phase shape `k̂`, when at least two intervals were observed.
    pub shape: Option<f64>,
    pub rate: Option<f64>,
    pub shape_se: Option<f64>,
    pub rate_se: Option<f64>,
    pub loglik: Option<f64>,
}

impl ForwardFit {
    pub fn phase(&self) -> Option<PhaseDist> {
        Some(PhaseDist::Gamma {
            shape: self.shape?,
            rate: self.rate?,
        })
    }
}

/// Fits `p` and a Gamma Y-phase law.
pub fn fit_forward(u: &ObservedData) -> Result<ForwardFit> {
    let p_hat = estimate_atom_prob(u)?;
    let lengths: Vec<f64> = u.intervals().iter().map(|iv| iv.l).collect();
    let gamma = if lengths.len() >= 2 {
        Some(fit_gamma_lengths(&lengths)?)
    } else {
        None
    };
    let loglik = gamma.map(|g| {
        forward_loglik(
            u,
            p_hat,
            &PhaseDist::Gamma {
                shape: g.shape,
                rate: g.rate,
            },
        )
    });
    Ok(ForwardFit {
        n: u.n(),
        m: u.m(),
        p_hat,
        shape: gamma.map(|g| g.shape),
        rate: gamma.map(|g| g.rate),
        shape_se: gamma.map(|g| g.shape_se),
        rate_se: gamma.map(|g| g.rate_se),
        loglik,
    })
}

/// Which area-interaction parameter the prior curve varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PriorTheta {
    Eta,
    Beta,
}

impl PriorTheta {
    fn value(&self, params: &AreaInteraction) -> f64 {
        match self {
            PriorTheta::Eta => params.eta,
            PriorTheta::Beta => params.beta,
        }
    }

    /// Copy of `params` with this parameter set to `theta`.
    pub fn set(&self, params: &AreaInteraction, theta: f64) -> AreaInteraction {
        match self {
            PriorTheta::Eta => params.with_eta(theta),
            PriorTheta::Beta => params.with_beta(theta),
        }
    }

    /// Statistic through which the parameter enters the density.
    fn statistic(&self, params: &AreaInteraction, sorted: &[f64]) -> f64 {
        match self {
            PriorTheta::Eta => covered_length_sorted(sorted, params.r, params.window),
            PriorTheta::Beta => sorted.len() as f64,
        }
    }

    /// `log h(x; θ) - log h(x; θ₀)` given the statistic of `x`.
    fn log_ratio(&self, params: &AreaInteraction, theta: f64, theta0: f64, stat: f64) -> f64 {
        if theta == theta0 {
            return 0.0;
        }
        match self {
            PriorTheta::Eta => -(theta - theta0) / (2.0 * params.r) * stat,
            PriorTheta::Beta => stat * (theta / theta0).ln(),
        }
    }
}

/// Monte Carlo estimate of `log E[h(X; θ) / h(X; θ₀)]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogMeanRatio {
    pub value: f64,
    /// Batch-means standard error of `value`.
    pub se: f64,
    /// Kish effective sample size of the weights.
    pub ess: f64,
}

/// Stored sample at the reference parameter, reduced to the statistic that
/// the varied parameter acts on.
#[derive(Debug, Clone, PartialEq)]
pub struct RatioSample {
    theta: PriorTheta,
    reference: AreaInteraction,
    stats: Vec<f64>,
}

impl RatioSample {
    pub fn from_patterns<'a, I>(theta: PriorTheta, reference: AreaInteraction, patterns: I) -> Self
    where
        I: IntoIterator<Item = &'a [f64]>,
    {
        let stats = patterns
            .into_iter()
            .map(|p| theta.statistic(&reference, p))
            .collect();
        RatioSample {
            theta,
            reference,
            stats,
        }
    }

    pub fn len(&self) -> usize {
        self.stats.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stats.is_empty()
    }

    pub fn log_mean_ratio(&self, theta: f64, batches: usize) -> LogMeanRatio {
        let theta0 = self.theta.value(&self.reference);
        if theta == theta0 || self.stats.is_empty() {
            return LogMeanRatio {
                value: 0.0,
                se: 0.0,
                ess: self.stats.len() as f64,
            };
        }
        let logs: Vec<f64> = self
            .stats
            .iter()
            .map(|&s| self.theta.log_ratio(&self.reference, theta, theta0, s))
            .collect();
        let max = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let w: Vec<f64> = logs.iter().map(|&l| (l - max).exp()).collect();
        let n = w.len() as f64;
        let sum: f64 = w.iter().sum();
        let sum2: f64 = w.iter().map(|x| x * x).sum();
        let mean = sum / n;
        let b = batches.clamp(2, w.len().max(2));
        let size = w.len() / b;
        let se = if size == 0 {
            f64::INFINITY
        } else {
            let bm: Vec<f64> = w
                .chunks_exact(size)
                .take(b)
                .map(|c| c.iter().sum::<f64>() / size as f64)
                .collect();
            let bmean = bm.iter().sum::<f64>() / b as f64;
            let bvar = bm.iter().map(|x| (x - bmean).powi(2)).sum::<f64>() / (b as f64 - 1.0);
            (bvar / b as f64).sqrt() / mean
        };
        LogMeanRatio {
            value: mean.ln() + max,
            se,
            ess: sum * sum / sum2,
        }
    }
}

/// How the prior sample at the reference parameter is drawn.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PriorSampler {
    /// Independent perfect draws.
    Cftp,
    /// One birth–death chain, recording every `thin` sweeps after burn-in.
    BirthDeath { burnin_sweeps: usize, thin_sweeps: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurveConfig {
    pub mcmc: MhConfig,
    pub prior_samples: usize,
    pub prior_sampler: PriorSampler,
    pub batches: usize,
    pub ess_floor: f64,
}

impl Default for CurveConfig {
    fn default() -> Self {
        CurveConfig {
            mcmc: MhConfig {
                burnin: 10_000,
                sweeps: 100_000,
                thin: 10,
                init_retries: 100_000,
            },
            prior_samples: 100_000,
            prior_sampler: PriorSampler::Cftp,
            batches: 20,
            ess_floor: 100.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PriorFitCurve {
    pub theta: PriorTheta,
    pub theta_grid: Vec<f64>,
    pub l_values: Vec<f64>,
    pub theta0: f64,
    pub mc_error: Vec<f64>,
    pub posterior_samples: usize,
    pub prior_samples: usize,
    pub warnings: Vec<String>,
}

impl PriorFitCurve {
    /// Grid value with the largest log relative likelihood.
    pub fn argmax(&self) -> Option<f64> {
        self.theta_grid
            .iter()
            .zip(&self.l_values)
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(t, _)| *t)
    }
}

/// Draws the prior sample at `reference` and reduces it to statistics.
pub fn prior_ratio_sample(
    theta: PriorTheta,
    reference: &AreaInteraction,
    samples: usize,
    sampler: PriorSampler,
    seed: u64,
) -> Result<RatioSample> {
    let stats: Vec<f64> = match sampler {
        PriorSampler::Cftp => (0..samples)
            .into_par_iter()
            .map(|i| {
                sample_prior_cftp(reference, derive_seed(seed, i as u64))
                    .map(|x| theta.statistic(reference, x.points()))
            })
            .collect::<Result<_>>()?,
        PriorSampler::BirthDeath {
            burnin_sweeps,
            thin_sweeps,
        } => {
            let mut chain = BirthDeathChain::new(*reference, seed);
            for _ in 0..burnin_sweeps {
                chain.sweep();
            }
            (0..samples)
                .map(|_| {
                    for _ in 0..thin_sweeps.max(1) {
                        chain.sweep();
                    }
                    theta.statistic(reference, chain.state())
                })
                .collect()
        }
    };
    Ok(RatioSample {
        theta,
        reference: *reference,
        stats,
    })
}

/// Log relative likelihood of `θ` against `θ₀ = reference` on a grid.
pub fn prior_loglik_curve(
    u: &ObservedData,
    theta_grid: &[f64],
    theta: PriorTheta,
    reference: &AreaInteraction,
    config: &CurveConfig,
    seed: u64,
) -> Result<PriorFitCurve> {
    prior_loglik_curve_replicated(std::slice::from_ref(u), theta_grid, theta, reference, config, seed)
}

/// As [`prior_loglik_curve`] for independent replicate observations on a
/// common window; the curve is the sum of the per-replicate curves.
pub fn prior_loglik_curve_replicated(
    data: &[ObservedData],
    theta_grid: &[f64],
    theta: PriorTheta,
    reference: &AreaInteraction,
    config: &CurveConfig,
    seed: u64,
) -> Result<PriorFitCurve> {
    if data.is_empty() {
        return Err(Error::EmptyData);
    }
    if theta_grid.is_empty() {
        return Err(Error::InvalidParameter("empty parameter grid".into()));
    }
    if theta == PriorTheta::Beta && theta_grid.iter().any(|&b| !(b > 0.0)) {
        return Err(Error::InvalidParameter("beta grid must be positive".into()));
    }
    let theta0 = theta.value(reference);

    let posterior: Vec<RatioSample> = data
        .par_iter()
        .enumerate()
        .map(|(r, u)| {
            let chain = mh_state_estimation(u, reference, &config.mcmc, derive_seed(seed, 2 * r as u64 + 1))?;
            let patterns: Vec<Vec<f64>> = if chain.dim() == 0 {
                vec![u.full_pattern(&[])]
            } else {
                (0..chain.len()).map(|i| chain.ground_pattern(i)).collect()
            };
            Ok(RatioSample::from_patterns(
                theta,
                *reference,
                patterns.iter().map(|p| p.as_slice()),
            ))
        })
        .collect::<Result<_>>()?;
    let prior = prior_ratio_sample(
        theta,
        reference,
        config.prior_samples,
        config.prior_sampler,
        derive_seed(seed, 0),
    )?;

    let reps = data.len() as f64;
    let mut warnings = Vec::new();
    let mut l_values = Vec::with_capacity(theta_grid.len());
    let mut mc_error = Vec::with_capacity(theta_grid.len());
    for &t in theta_grid {
        let pr = prior.log_mean_ratio(t, config.batches);
        let mut value = -reps * pr.value;
        let mut var = (reps * pr.se).powi(2);
        if pr.ess < config.ess_floor {
            warnings.push(format!(
                "prior-sample effective size {:.1} below floor {} at theta={t}",
                pr.ess, config.ess_floor
            ));
        }
        for (r, post) in posterior.iter().enumerate() {
            let po = post.log_mean_ratio(t, config.batches);
            value += po.value;
            var += po.se.powi(2);
            if po.ess < config.ess_floor {
                warnings.push(format!(
                    "posterior-sample effective size {:.1} below floor {} at theta={t} (replicate {r})",
                    po.ess, config.ess_floor
                ));
            }
        }
        l_values.push(value);
        mc_error.push(var.sqrt());
    }
    Ok(PriorFitCurve {
        theta,
        theta_grid: theta_grid.to_vec(),
        l_values,
        theta0,
        mc_error,
        posterior_samples: posterior.iter().map(|p| p.len()).sum(),
        prior_samples: prior.len(),
        warnings,
    })
}
