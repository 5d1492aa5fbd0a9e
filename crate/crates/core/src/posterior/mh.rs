//! Single-site Metropolis–Hastings over one latent time per interval.
//!
//! Each step picks an interval uniformly, proposes a uniform location on the
//! interval clipped to the window, and accepts with probability
//! `min(1, p_X(new) / p_X(current))`. The proposal is symmetric, so the
//! proposal densities cancel.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{log_target, ObservedData};
use crate::error::{Error, Result};
use crate::prior::PriorDensity;
use crate::{seeded_rng, SimRng};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MhConfig {
    /// Single-site updates discarded before recording.
    pub burnin: usize,
    /// Single-site updates after burn-in.
    pub sweeps: usize,
    /// Recording stride.
    pub thin: usize,
    /// Redraws allowed when looking for a prior-positive initial state.
    pub init_retries: usize,
}

impl Default for MhConfig {
    fn default() -> Self {
        MhConfig {
            burnin: 10_000,
            sweeps: 100_000,
            thin: 1,
            init_retries: 100_000,
        }
    }
}

/// Current vector of latent times and the cached log prior density of the
/// full configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainState {
    pub x: Vec<f64>,
    pub log_prior: f64,
}

/// Thinned output of a chain.
#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorSample {
    dim: usize,
    snapshots: Vec<f64>,
    log_priors: Vec<f64>,
    atoms: Vec<f64>,
    pub accepted: u64,
    pub proposals: u64,
    pub sweeps: usize,
}

impl PosteriorSample {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.log_priors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.log_priors.is_empty()
    }

    pub fn state(&self, i: usize) -> &[f64] {
        &self.snapshots[i * self.dim..(i + 1) * self.dim]
    }

    pub fn log_prior(&self, i: usize) -> f64 {
        self.log_priors[i]
    }

    /// Snapshots in recording order.
    pub fn states(&self) -> impl Iterator<Item = &[f64]> + '_ {
        (0..self.len()).map(move |i| self.state(i))
    }

    /// Recorded values of latent time `j`.
    pub fn coordinate(&self, j: usize) -> Vec<f64> {
        self.states().map(|s| s[j]).collect()
    }

    /// Sorted union of the atoms and snapshot `i`.
    pub fn ground_pattern(&self, i: usize) -> Vec<f64> {
        let mut all = self.atoms.clone();
        all.extend_from_slice(self.state(i));
        all.sort_by(f64::total_cmp);
        all
    }

    pub fn acceptance_rate(&self) -> f64 {
        if self.proposals == 0 {
            1.0
        } else {
            self.accepted as f64 / self.proposals as f64
        }
    }
}

/// Density of proposing `y` from `x` (zero unless they differ in at most one
/// coordinate and the new value lies in that coordinate's support).
pub fn proposal_density(u: &ObservedData, x: &[f64], y: &[f64]) -> f64 {
    let k = u.k();
    let diff: Vec<usize> = (0..k).filter(|&i| x[i] != y[i]).collect();
    let single = |i: usize| {
        let (s, e) = u.support(i);
        if s <= y[i] && y[i] <= e {
            1.0 / (k as f64 * (e - s))
        } else {
            0.0
        }
    };
    match diff.as_slice() {
        [] => (0..k).map(single).sum(),
        [i] => single(*i),
        _ => 0.0,
    }
}

/// Acceptance probability of replacing coordinate `i` of `x` by `y_i`.
pub fn acceptance_probability(u: &ObservedData, prior: &dyn PriorDensity, x: &[f64], i: usize, y_i: f64) -> f64 {
    let current = log_target(u, x, prior);
    let mut y = x.to_vec();
    y[i] = y_i;
    let proposed = log_target(u, &y, prior);
    if proposed == f64::NEG_INFINITY {
        return 0.0;
    }
    (proposed - current).exp().min(1.0)
}

/// Stateful chain; [`mh_state_estimation`] drives it.
pub struct MhSampler<'a> {
    data: &'a ObservedData,
    prior: &'a dyn PriorDensity,
    state: ChainState,
    rng: SimRng,
    accepted: u64,
    proposals: u64,
    supports: Vec<(f64, f64)>,
}

impl<'a> MhSampler<'a> {
    /// Draws an initial state uniformly per interval, retrying until the prior
    /// density of the full configuration is positive.
    pub fn new(data: &'a ObservedData, prior: &'a dyn PriorDensity, seed: u64, retries: usize) -> Result<Self> {
        let mut rng = seeded_rng(seed);
        let supports: Vec<(f64, f64)> = (0..data.k()).map(|i| data.support(i)).collect();
        for _ in 0..retries.max(1) {
            let x: Vec<f64> = supports
                .iter()
                .map(|&(s, e)| s + rng.random::<f64>() * (e - s))
                .collect();
            let lp = log_target(data, &x, prior);
            if lp > f64::NEG_INFINITY {
                return Ok(MhSampler {
                    data,
                    prior,
                    state: ChainState { x, log_prior: lp },
                    rng,
                    accepted: 0,
                    proposals: 0,
                    supports,
                });
            }
        }
        Err(Error::Initialisation { retries })
    }

    /// Starts from a given state, which must have positive target density.
    pub fn from_state(data: &'a ObservedData, prior: &'a dyn PriorDensity, x: Vec<f64>, seed: u64) -> Result<Self> {
        let lp = log_target(data, &x, prior);
        if lp == f64::NEG_INFINITY {
            return Err(Error::Inconsistent("initial state outside the state space".into()));
        }
        Ok(MhSampler {
            data,
            prior,
            state: ChainState { x, log_prior: lp },
            rng: seeded_rng(seed),
            accepted: 0,
            proposals: 0,
            supports: (0..data.k()).map(|i| data.support(i)).collect(),
        })
    }

    pub fn state(&self) -> &ChainState {
        &self.state
    }

    pub fn accepted(&self) -> u64 {
        self.accepted
    }

    pub fn proposals(&self) -> u64 {
        self.proposals
    }

    /// One single-site update; returns whether it was accepted.
    pub fn step(&mut self) -> bool {
        let k = self.supports.len();
        let i = self.rng.random_range(0..k);
        let (s, e) = self.supports[i];
        let y_i = s + self.rng.random::<f64>() * (e - s);
        let old = self.state.x[i];
        self.state.x[i] = y_i;
        let proposed = log_target(self.data, &self.state.x, self.prior);
        self.proposals += 1;
        let log_ratio = proposed - self.state.log_prior;
        let accept = proposed > f64::NEG_INFINITY && (log_ratio >= 0.0 || self.rng.random::<f64>() < log_ratio.exp());
        if accept {
            self.state.log_prior = proposed;
            self.accepted += 1;
        } else {
            self.state.x[i] = old;
        }
        accept
    }
}

/// Runs the sampler for `burnin + sweeps` single-site updates and records
/// every `thin`-th state after burn-in. With no intervals there is nothing to
/// sample and an empty result is returned.
pub fn mh_state_estimation(
    u: &ObservedData,
    prior: &dyn PriorDensity,
    config: &MhConfig,
    seed: u64,
) -> Result<PosteriorSample> {
    if config.thin == 0 {
        return Err(Error::InvalidParameter("thin must be at least 1".into()));
    }
    let k = u.k();
    if k == 0 {
        return Ok(PosteriorSample {
            dim: 0,
            snapshots: Vec::new(),
            log_priors: Vec::new(),
            atoms: u.atoms().to_vec(),
            accepted: 0,
            proposals: 0,
            sweeps: 0,
        });
    }
    let mut sampler = MhSampler::new(u, prior, seed, config.init_retries)?;
    for _ in 0..config.burnin {
        sampler.step();
    }
    let burn_acc = sampler.accepted;
    let burn_prop = sampler.proposals;
    let n_keep = config.sweeps / config.thin;
    let mut snapshots = Vec::with_capacity(n_keep * k);
    let mut log_priors = Vec::with_capacity(n_keep);
    for it in 1..=config.sweeps {
        sampler.step();
        if it % config.thin == 0 {
            debug_assert!(u.in_state_space(&sampler.state.x));
            snapshots.extend_from_slice(&sampler.state.x);
            log_priors.push(sampler.state.log_prior);
        }
    }
    Ok(PosteriorSample {
        dim: k,
        snapshots,
        log_priors,
        atoms: u.atoms().to_vec(),
        accepted: sampler.accepted - burn_acc,
        proposals: sampler.proposals - burn_prop,
        sweeps: config.sweeps,
    })
}
