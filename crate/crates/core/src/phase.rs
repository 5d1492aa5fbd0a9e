//! Phase-length distributions for the alternating renewal process.

use rand::Rng;
use rand_distr::Distribution;
use serde::{Deserialize, Serialize};
use statrs::distribution::{Continuous, ContinuousCDF};

use crate::error::{Error, Result};

/// Law of a single phase length (Y or Z) of a renewal cycle.
///
/// Gamma is parametrised by shape and *rate*.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PhaseDist {
    Exponential { rate: f64 },
    Gamma { shape: f64, rate: f64 },
    Uniform { lo: f64, hi: f64 },
}

impl PhaseDist {
    pub fn exponential(rate: f64) -> Result<Self> {
        let d = PhaseDist::Exponential { rate };
        d.validate()?;
        Ok(d)
    }

    pub fn gamma(shape: f64, rate: f64) -> Result<Self> {
        let d = PhaseDist::Gamma { shape, rate };
        d.validate()?;
        Ok(d)
    }

    pub fn uniform(lo: f64, hi: f64) -> Result<Self> {
        let d = PhaseDist::Uniform { lo, hi };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            PhaseDist::Exponential { rate } => rate.is_finite() && rate > 0.0,
            PhaseDist::Gamma { shape, rate } => {
                shape.is_finite() && rate.is_finite() && shape > 0.0 && rate > 0.0
            }
            PhaseDist::Uniform { lo, hi } => lo.is_finite() && hi.is_finite() && 0.0 <= lo && lo < hi,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::DistributionParameter(format!("{self:?}")))
        }
    }

    pub fn mean(&self) -> f64 {
        match *self {
            PhaseDist::Exponential { rate } => 1.0 / rate,
            PhaseDist::Gamma { shape, rate } => shape / rate,
            PhaseDist::Uniform { lo, hi } => 0.5 * (lo + hi),
        }
    }

    pub fn variance(&self) -> f64 {
        match *self {
            PhaseDist::Exponential { rate } => 1.0 / (rate * rate),
            PhaseDist::Gamma { shape, rate } => shape / (rate * rate),
            PhaseDist::Uniform { lo, hi } => (hi - lo).powi(2) / 12.0,
        }
    }

    pub fn pdf(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        match *self {
            PhaseDist::Exponential { rate } => rate * (-rate * x).exp(),
            PhaseDist::Gamma { shape, rate } => {
                if x == 0.0 {
                    return if shape < 1.0 {
                        f64::INFINITY
                    } else if shape == 1.0 {
                        rate
                    } else {
                        0.0
                    };
                }
                statrs::distribution::Gamma::new(shape, rate)
                    .map(|g| g.pdf(x))
                    .unwrap_or(0.0)
            }
            PhaseDist::Uniform { lo, hi } => {
                if (lo..=hi).contains(&x) {
                    1.0 / (hi - lo)
                } else {
                    0.0
                }
            }
        }
    }

    pub fn ln_pdf(&self, x: f64) -> f64 {
        match *self {
            PhaseDist::Exponential { rate } if x >= 0.0 => rate.ln() - rate * x,
            PhaseDist::Gamma { shape, rate } if x > 0.0 => {
                shape * rate.ln() + (shape - 1.0) * x.ln()
                    - rate * x
                    - statrs::function::gamma::ln_gamma(shape)
            }
            _ => self.pdf(x).ln(),
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        match *self {
            PhaseDist::Exponential { rate } => -(-rate * x).exp_m1(),
            PhaseDist::Gamma { shape, rate } => statrs::distribution::Gamma::new(shape, rate)
                .map(|g| g.cdf(x))
                .unwrap_or(f64::NAN),
            PhaseDist::Uniform { lo, hi } => ((x - lo) / (hi - lo)).clamp(0.0, 1.0),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<f64> {
        let x = match *self {
            PhaseDist::Exponential { rate } => rand_distr::Exp::new(rate)
                .map_err(|e| Error::DistributionParameter(e.to_string()))?
                .sample(rng),
            PhaseDist::Gamma { shape, rate } => rand_distr::Gamma::new(shape, 1.0 / rate)
                .map_err(|e| Error::DistributionParameter(e.to_string()))?
                .sample(rng),
            PhaseDist::Uniform { lo, hi } => rng.random_range(lo..hi),
        };
        if x.is_finite() {
            Ok(x)
        } else {
            Err(Error::DistributionParameter(format!(
                "non-finite draw {x} from {self:?}"
            )))
        }
    }

    /// Density `l f(l) / E[Y]` of the length-biased version of this law.
    pub fn length_biased_pdf(&self, l: f64) -> f64 {
        l * self.pdf(l) / self.mean()
    }

    /// Draw from the length-biased law.
    pub fn sample_length_biased<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<f64> {
        match *self {
            PhaseDist::Exponential { rate } => PhaseDist::Gamma { shape: 2.0, rate }.sample(rng),
            PhaseDist::Gamma { shape, rate } => PhaseDist::Gamma {
                shape: shape + 1.0,
                rate,
            }
            .sample(rng),
            PhaseDist::Uniform { lo, hi } => {
                let u: f64 = rng.random();
                Ok((lo * lo + u * (hi * hi - lo * lo)).sqrt())
            }
        }
    }

    /// CDF of the length-biased law.
    pub fn length_biased_cdf(&self, l: f64) -> f64 {
        match *self {
            PhaseDist::Exponential { rate } => PhaseDist::Gamma { shape: 2.0, rate }.cdf(l),
            PhaseDist::Gamma { shape, rate } => PhaseDist::Gamma {
                shape: shape + 1.0,
                rate,
            }
            .cdf(l),
            PhaseDist::Uniform { lo, hi } => {
                let l = l.clamp(lo, hi);
                (l * l - lo * lo) / (hi * hi - lo * lo)
            }
        }
    }
}
