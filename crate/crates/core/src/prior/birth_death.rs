use rand::Rng;

use super::{AreaInteraction, PointPattern};
use crate::error::{Error, Result};
use crate::{seeded_rng, SimRng};

/// Birth–death Metropolis–Hastings chain targeting an area-interaction law.
///
/// Each proposal is a birth (uniform location) or a death (uniformly chosen
/// point) with probability one half.
#[derive(Debug, Clone)]
pub struct BirthDeathChain {
    params: AreaInteraction,
    state: Vec<f64>,
    rng: SimRng,
    proposals: u64,
    accepted: u64,
}

impl BirthDeathChain {
    pub fn new(params: AreaInteraction, seed: u64) -> Self {
        BirthDeathChain {
            params,
            state: Vec::new(),
            rng: seeded_rng(seed),
            proposals: 0,
            accepted: 0,
        }
    }

    /// Number of proposals that make up one sweep: `2 ⌈β ℓ(W)⌉`, at least one.
    pub fn sweep_len(&self) -> usize {
        (2.0 * (self.params.beta * self.params.window.length()).ceil()).max(1.0) as usize
    }

    pub fn state(&self) -> &[f64] {
        &self.state
    }

    pub fn acceptance_rate(&self) -> f64 {
        if self.proposals == 0 {
            0.0
        } else {
            self.accepted as f64 / self.proposals as f64
        }
    }

    pub fn step(&mut self) {
        self.proposals += 1;
        let w = self.params.window;
        let len = w.length();
        let n = self.state.len();
        if self.rng.random::<f64>() < 0.5 {
            let u = w.lo + self.rng.random::<f64>() * len;
            if !w.contains(u) {
                return;
            }
            let lambda = self.params.conditional_intensity(&self.state, u);
            let ratio = lambda * len / (n + 1) as f64;
            if self.rng.random::<f64>() < ratio {
                let pos = self.state.partition_point(|&x| x < u);
                self.state.insert(pos, u);
                self.accepted += 1;
            }
        } else {
            if n == 0 {
                return;
            }
            let i = self.rng.random_range(0..n);
            let xi = self.state.remove(i);
            let lambda = self.params.conditional_intensity(&self.state, xi);
            let ratio = n as f64 / (len * lambda);
            if self.rng.random::<f64>() < ratio {
                self.accepted += 1;
            } else {
                self.state.insert(i, xi);
            }
        }
    }

    pub fn sweep(&mut self) {
        for _ in 0..self.sweep_len() {
            self.step();
        }
    }

    pub fn pattern(&self) -> PointPattern {
        PointPattern {
            points: self.state.clone(),
            window: self.params.window,
        }
    }
}

/// Approximate prior draw after `sweeps` sweeps from the empty pattern.
pub fn sample_prior_bdmh(params: &AreaInteraction, sweeps: usize, seed: u64) -> Result<PointPattern> {
    if sweeps == 0 {
        return Err(Error::InvalidParameter("sweeps must be at least 1".into()));
    }
    let mut chain = BirthDeathChain::new(*params, seed);
    for _ in 0..sweeps {
        chain.sweep();
    }
    Ok(chain.pattern())
}
