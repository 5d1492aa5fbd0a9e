//! Dominated coupling from the past for the area-interaction process.
//!
//! The dominating process is a spatial birth–death process with birth rate
//! `β* = β max(1, e^{-η})` per unit length and unit death rate, whose
//! stationary law is Poisson. It is generated backwards from time zero and
//! extended on demand, so every epoch doubling reuses the same randomness.
//! Upper and lower processes are thinned from it forwards: a birth at `ξ`
//! with mark `m` enters the upper process when `m β* <= max λ(·, ξ)` and the
//! lower one when `m β* <= min λ(·, ξ)`, the extremes being taken over the
//! current lower and upper configurations. The conditional intensity is
//! monotone in the configuration for either sign of `η`, so those two values
//! bound it over everything sandwiched between them.

use rand::Rng;
use rand_distr::{Distribution, Exp1, Poisson};

use super::{AreaInteraction, PointPattern};
use crate::error::{Error, Result};
use crate::{seeded_rng, SimRng};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CftpConfig {
    /// Length of the first backward epoch.
    pub initial_epoch: f64,
    /// Largest epoch tried before giving up.
    pub max_epoch: f64,
}

impl Default for CftpConfig {
    fn default() -> Self {
        CftpConfig {
            initial_epoch: 1.0,
            max_epoch: (1u64 << 20) as f64,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct PathPoint {
    loc: f64,
    mark: f64,
    /// Forward birth time, `None` while it lies before the explored range.
    birth: Option<f64>,
    /// Forward death time, `+inf` for points alive at time zero.
    death: f64,
}

/// Dominating process explored backwards from time zero.
struct DominatingPath {
    rng: SimRng,
    lo: f64,
    len: f64,
    rate: f64,
    points: Vec<PathPoint>,
    alive: Vec<usize>,
    next_event: f64,
}

impl DominatingPath {
    fn new(params: &AreaInteraction, seed: u64) -> Result<Self> {
        let mut rng = seeded_rng(seed);
        let lo = params.window.lo;
        let len = params.window.length();
        let rate = params.dominating_rate();
        let mean = rate * len;
        let n0: f64 = Poisson::new(mean)
            .map_err(|e| Error::InvalidParameter(e.to_string()))?
            .sample(&mut rng);
        let mut points = Vec::with_capacity(n0 as usize);
        for _ in 0..n0 as usize {
            points.push(PathPoint {
                loc: lo + rng.random::<f64>() * len,
                mark: rng.random(),
                birth: None,
                death: f64::INFINITY,
            });
        }
        let alive = (0..points.len()).collect();
        let mut path = DominatingPath {
            rng,
            lo,
            len,
            rate,
            points,
            alive,
            next_event: 0.0,
        };
        path.next_event = -path.draw_gap();
        Ok(path)
    }

    fn draw_gap(&mut self) -> f64 {
        let total = self.rate * self.len + self.alive.len() as f64;
        let e: f64 = Exp1.sample(&mut self.rng);
        e / total
    }

    /// Explores the path back to time `-horizon`.
    fn extend(&mut self, horizon: f64) {
        while self.next_event >= -horizon {
            let t = self.next_event;
            let total = self.rate * self.len + self.alive.len() as f64;
            let pick = self.rng.random::<f64>() * total;
            if pick < self.alive.len() as f64 {
                // Backwards death = forward birth of an existing point.
                let k = (pick as usize).min(self.alive.len() - 1);
                let idx = self.alive.swap_remove(k);
                self.points[idx].birth = Some(t);
            } else {
                // Backwards birth = forward death of a point born earlier.
                let loc = self.lo + self.rng.random::<f64>() * self.len;
                let mark = self.rng.random();
                self.points.push(PathPoint {
                    loc,
                    mark,
                    birth: None,
                    death: t,
                });
                self.alive.push(self.points.len() - 1);
            }
            self.next_event = t - self.draw_gap();
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum Event {
    Birth(usize),
    Death(usize),
}

/// Sorted configuration keyed by path point index.
#[derive(Debug, Default, Clone, PartialEq)]
struct Config {
    locs: Vec<f64>,
    ids: Vec<usize>,
}

impl Config {
    fn insert(&mut self, loc: f64, id: usize) {
        let pos = self.locs.partition_point(|&x| x < loc);
        self.locs.insert(pos, loc);
        self.ids.insert(pos, id);
    }

    fn remove(&mut self, loc: f64, id: usize) {
        let start = self.locs.partition_point(|&x| x < loc);
        if let Some(off) = self.ids[start..].iter().position(|&i| i == id) {
            self.locs.remove(start + off);
            self.ids.remove(start + off);
        }
    }
}

pub fn sample_prior_cftp(params: &AreaInteraction, seed: u64) -> Result<PointPattern> {
    sample_prior_cftp_with(params, seed, &CftpConfig::default())
}

pub fn sample_prior_cftp_with(params: &AreaInteraction, seed: u64, config: &CftpConfig) -> Result<PointPattern> {
    if !(config.initial_epoch > 0.0 && config.max_epoch >= config.initial_epoch) {
        return Err(Error::InvalidParameter(format!("bad CFTP epochs {config:?}")));
    }
    let mut path = DominatingPath::new(params, seed)?;
    let beta_star = path.rate;
    let mut horizon = config.initial_epoch;
    loop {
        path.extend(horizon);
        if let Some(points) = run_sandwich(params, &path, beta_star) {
            return Ok(PointPattern {
                points,
                window: params.window,
            });
        }
        if horizon >= config.max_epoch {
            return Err(Error::NonCoalescence {
                max_epoch: config.max_epoch,
            });
        }
        horizon = (2.0 * horizon).min(config.max_epoch);
    }
}

/// Runs the upper and lower processes forward from the explored start time.
/// Returns the common state at time zero when they have coalesced.
fn run_sandwich(params: &AreaInteraction, path: &DominatingPath, beta_star: f64) -> Option<Vec<f64>> {
    let mut upper = Config::default();
    let mut lower = Config::default();
    let mut events: Vec<(f64, Event)> = Vec::new();
    for (idx, p) in path.points.iter().enumerate() {
        match p.birth {
            None => upper.insert(p.loc, idx),
            Some(b) => events.push((b, Event::Birth(idx))),
        }
        if p.death.is_finite() {
            events.push((p.death, Event::Death(idx)));
        }
    }
    events.sort_by(|a, b| a.0.total_cmp(&b.0));

    for (_, ev) in events {
        match ev {
            Event::Birth(idx) => {
                let p = path.points[idx];
                let lu = params.conditional_intensity(&upper.locs, p.loc);
                let ll = params.conditional_intensity(&lower.locs, p.loc);
                let threshold = p.mark * beta_star;
                if threshold <= lu.max(ll) {
                    upper.insert(p.loc, idx);
                }
                if threshold <= lu.min(ll) {
                    lower.insert(p.loc, idx);
                }
            }
            Event::Death(idx) => {
                let loc = path.points[idx].loc;
                upper.remove(loc, idx);
                lower.remove(loc, idx);
            }
        }
    }
    (upper == lower).then_some(upper.locs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prior::Window;

    #[test]
    fn deterministic_for_fixed_seed() {
        let p = AreaInteraction::new(12.0, 1.2, 0.05, Window::unit()).unwrap();
        let a = sample_prior_cftp(&p, 77).unwrap();
        let b = sample_prior_cftp(&p, 77).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn extension_reuses_randomness() {
        let p = AreaInteraction::new(12.0, -1.2, 0.05, Window::unit()).unwrap();
        let mut once = DominatingPath::new(&p, 5).unwrap();
        once.extend(8.0);
        let mut twice = DominatingPath::new(&p, 5).unwrap();
        twice.extend(2.0);
        twice.extend(4.0);
        twice.extend(8.0);
        assert_eq!(once.points.len(), twice.points.len());
        for (a, b) in once.points.iter().zip(&twice.points) {
            assert_eq!(a.loc, b.loc);
            assert_eq!(a.birth, b.birth);
            assert_eq!(a.death, b.death);
        }
    }

    #[test]
    fn non_coalescence_is_reported() {
        let p = AreaInteraction::new(200.0, 3.0, 0.2, Window::new(0.0, 5.0).unwrap()).unwrap();
        let cfg = CftpConfig {
            initial_epoch: 1e-3,
            max_epoch: 1e-3,
        };
        assert!(matches!(
            sample_prior_cftp_with(&p, 1, &cfg),
            Err(Error::NonCoalescence { .. })
        ));
    }

    #[test]
    fn output_inside_window() {
        let p = AreaInteraction::new(20.0, 0.6, 0.05, Window::new(2.0, 3.5).unwrap()).unwrap();
        for seed in 0..20 {
            let x = sample_prior_cftp(&p, seed).unwrap();
            assert!(x.points().iter().all(|&v| 2.0 < v && v < 3.5));
            assert!(x.points().windows(2).all(|w| w[0] < w[1]));
        }
    }
}
