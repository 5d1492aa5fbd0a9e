//! Bayesian state estimation for interval-censored ("aoristic") event times.
//!
//! Event times observed through an alternating renewal censoring mechanism
//! are recorded either exactly (atoms) or only up to an interval. This crate
//! provides
//!
//! - [`renewal`]: simulation of the censoring mechanism, the renewal function
//!   and the finite-time age/excess law,
//! - [`marks`]: the limiting mark law (atom plus length-biased intervals),
//! - [`prior`]: area-interaction point process priors with birth–death and
//!   dominated coupling-from-the-past samplers,
//! - [`posterior`]: the posterior of the latent times, a single-site
//!   Metropolis–Hastings sampler, the Poisson closed form and exact
//!   assignment-counting oracles,
//! - [`estimate`]: forward-model maximum likelihood and Monte Carlo relative
//!   likelihoods for prior parameters,
//! - [`cli`], [`io`], [`config`] and [`validation`]: the command-line surface.
//!
//! ```
//! use aoristic::marks::Mark;
//! use aoristic::posterior::{mh_state_estimation, MhConfig, ObservedData};
//! use aoristic::prior::{AreaInteraction, Window};
//!
//! let data = ObservedData::new(
//!     vec![0.51, 0.58],
//!     vec![Mark { a: 0.45, l: 0.4 }],
//!     Window::unit(),
//! )
//! .unwrap();
//! let prior = AreaInteraction::new(12.0, 1.2, 0.1, Window::unit()).unwrap();
//! let config = MhConfig { burnin: 1_000, sweeps: 5_000, ..MhConfig::default() };
//! let chain = mh_state_estimation(&data, &prior, &config, 42).unwrap();
//! assert_eq!(chain.len(), 5_000);
//! ```

pub mod cli;
pub mod config;
pub mod error;
pub mod estimate;
pub mod io;
pub mod marks;
pub mod phase;
pub mod posterior;
pub mod prior;
pub mod renewal;
pub mod stats;
pub mod validation;

pub use error::{Error, Result};

use rand::SeedableRng;

/// Random number generator used throughout; reproducible across platforms.
pub type SimRng = rand_chacha::ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> SimRng {
    SimRng::seed_from_u64(seed)
}

/// Derives an independent stream seed from a base seed (SplitMix64 mixing).
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed
        .wrapping_add(stream.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
