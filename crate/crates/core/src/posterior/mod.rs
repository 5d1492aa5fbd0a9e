//! Posterior of latent event times given aoristic observations.
//!
//! Observed data consist of `m` atoms (exactly observed times) and `n - m`
//! closed intervals. The sampler works on ordered vectors with one latent time
//! per interval, targeting a density proportional to the prior density of the
//! full configuration; projecting onto the set of locations gives the
//! posterior of the ground process.

mod assignment;
mod mh;
mod poisson;

pub use assignment::{
    assignment_distribution, count_valid_assignments, sample_assignment, WeightedAssignment,
    MAX_ASSIGNMENT_SIZE, MAX_ENUMERATION_SIZE,
};
pub use mh::{
    acceptance_probability, mh_state_estimation, proposal_density, ChainState, MhConfig, MhSampler,
    PosteriorSample,
};
pub use poisson::{poisson_posterior_sample, Intensity};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::marks::Mark;
use crate::prior::{PriorDensity, Window};

/// A realisation of the observation process: atoms plus absolute intervals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservedData {
    atoms: Vec<f64>,
    intervals: Vec<Mark>,
    window: Window,
}

impl ObservedData {
    pub fn new(atoms: Vec<f64>, intervals: Vec<Mark>, window: Window) -> Result<Self> {
        if let Some(&a) = atoms.iter().find(|&&a| !window.contains(a)) {
            return Err(Error::Domain {
                what: "atom outside window",
                value: a,
            });
        }
        for (index, iv) in intervals.iter().enumerate() {
            if !(iv.l > 0.0 && iv.l.is_finite() && iv.a.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "interval {index} has non-positive length {}",
                    iv.l
                )));
            }
            if window.clip(iv.a, iv.a + iv.l).is_none() {
                return Err(Error::OutsideWindow { index });
            }
        }
        Ok(ObservedData {
            atoms,
            intervals,
            window,
        })
    }

    /// Splits a list of absolute marks into atoms (`l == 0`) and intervals.
    pub fn from_marks(marks: &[Mark], window: Window) -> Result<Self> {
        let atoms = marks.iter().filter(|m| m.l == 0.0).map(|m| m.a).collect();
        let intervals = marks.iter().filter(|m| m.l != 0.0).copied().collect();
        ObservedData::new(atoms, intervals, window)
    }

    pub fn atoms(&self) -> &[f64] {
        &self.atoms
    }

    pub fn intervals(&self) -> &[Mark] {
        &self.intervals
    }

    pub fn window(&self) -> Window {
        self.window
    }

    /// Total number of observations `n`.
    pub fn n(&self) -> usize {
        self.atoms.len() + self.intervals.len()
    }

    /// Number of atoms `m`.
    pub fn m(&self) -> usize {
        self.atoms.len()
    }

    /// Number of latent times to be estimated, `n - m`.
    pub fn k(&self) -> usize {
        self.intervals.len()
    }

    /// Support of latent time `i`: its interval clipped to the window.
    pub fn support(&self, i: usize) -> (f64, f64) {
        let iv = self.intervals[i];
        self.window
            .clip(iv.a, iv.a + iv.l)
            .expect("validated on construction")
    }

    /// Atoms followed by the given latent times, in ascending order.
    pub fn full_pattern(&self, x: &[f64]) -> Vec<f64> {
        let mut all = Vec::with_capacity(self.atoms.len() + x.len());
        all.extend_from_slice(&self.atoms);
        all.extend_from_slice(x);
        all.sort_by(f64::total_cmp);
        all
    }

    /// Whether `x[i]` lies in the support of interval `i` for every `i`.
    pub fn in_state_space(&self, x: &[f64]) -> bool {
        x.len() == self.k()
            && x.iter().enumerate().all(|(i, &xi)| {
                let (s, e) = self.support(i);
                self.window.contains(xi) && s <= xi && xi <= e
            })
    }
}

/// Log of the sampler's target on ordered vectors: the prior log density of
/// atoms ∪ x, or `-inf` outside the state space.
pub fn log_target(u: &ObservedData, x: &[f64], prior: &dyn PriorDensity) -> f64 {
    if !u.in_state_space(x) {
        return f64::NEG_INFINITY;
    }
    prior.log_density(&u.full_pattern(x))
}

/// Unnormalised log posterior of the latent set `x` (any order): prior log
/// density plus the log number of valid point-to-interval assignments.
///
/// This evaluates the permutation sum and is meant for small instances only.
pub fn log_posterior_unnorm(u: &ObservedData, x: &[f64], prior: &dyn PriorDensity) -> Result<f64> {
    if x.len() != u.k() {
        return Err(Error::InvalidParameter(format!(
            "expected {} latent times, got {}",
            u.k(),
            x.len()
        )));
    }
    if x.iter().any(|&xi| !u.window.contains(xi)) {
        return Ok(f64::NEG_INFINITY);
    }
    let count = count_valid_assignments(x, &u.intervals)?;
    if count == 0 {
        return Ok(f64::NEG_INFINITY);
    }
    Ok(prior.log_density(&u.full_pattern(x)) + (count as f64).ln())
}
