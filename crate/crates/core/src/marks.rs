//! Equilibrium mark law: an atom at the origin mixed with intervals whose
//! length is length-biased `f_Y` and whose left offset is uniform.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::phase::PhaseDist;
use crate::renewal::{AgeExcess, RenewalSpec};

/// Interval parametrised by left offset `a` and length `l`.
///
/// In relative form `a <= 0 <= a + l` and the interval recorded for a latent
/// time `t` is `[t + a, t + a + l]`. Atoms have `l == 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mark {
    pub a: f64,
    pub l: f64,
}

impl Mark {
    pub const ATOM: Mark = Mark { a: 0.0, l: 0.0 };

    pub fn is_atom(&self) -> bool {
        self.l == 0.0
    }

    /// Whether the relative-form support condition `a <= 0 <= a + l` holds.
    pub fn covers_origin(&self) -> bool {
        self.l >= 0.0 && self.a <= 0.0 && 0.0 <= self.a + self.l
    }

    /// Absolute interval recorded for latent time `t`.
    pub fn at(&self, t: f64) -> Mark {
        Mark { a: t + self.a, l: self.l }
    }
}

impl From<AgeExcess> for Mark {
    fn from(ae: AgeExcess) -> Self {
        if ae.is_atom {
            Mark::ATOM
        } else {
            Mark {
                a: -ae.age,
                l: ae.age + ae.excess,
            }
        }
    }
}

/// Mixture law of marks: atom with weight `p`, otherwise the continuous part
/// with kernel `f_Y(l) / E[Y]` on `{a <= 0 <= a + l}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarkLaw {
    p: f64,
    f_y: PhaseDist,
    mean_y: f64,
}

/// Density evaluation of a mark under [`MarkLaw`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MarkDensity {
    /// Point mass of the atom.
    Atom(f64),
    /// Kernel value `f_Y(l) / E[Y]`; multiply by `continuous_weight` for the
    /// mixture density.
    Continuous { kernel: f64, continuous_weight: f64 },
}

impl MarkDensity {
    /// Value with the mixture weight folded in.
    pub fn weighted(&self) -> f64 {
        match *self {
            MarkDensity::Atom(w) => w,
            MarkDensity::Continuous {
                kernel,
                continuous_weight,
            } => kernel * continuous_weight,
        }
    }
}

impl MarkLaw {
    pub fn new(p: f64, f_y: PhaseDist) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidParameter(format!("atom probability {p} not in [0, 1]")));
        }
        f_y.validate()?;
        Ok(MarkLaw {
            p,
            f_y,
            mean_y: f_y.mean(),
        })
    }

    /// Equilibrium law induced by a renewal censoring mechanism.
    pub fn from_renewal(spec: &RenewalSpec) -> Result<Self> {
        MarkLaw::new(spec.atom_probability(), spec.y)
    }

    pub fn atom_probability(&self) -> f64 {
        self.p
    }

    pub fn phase(&self) -> &PhaseDist {
        &self.f_y
    }

    pub fn mean_y(&self) -> f64 {
        self.mean_y
    }

    pub fn density(&self, mark: Mark) -> MarkDensity {
        if mark.is_atom() {
            let w = if mark.a == 0.0 { self.p } else { 0.0 };
            return MarkDensity::Atom(w);
        }
        let kernel = if mark.covers_origin() {
            self.f_y.pdf(mark.l) / self.mean_y
        } else {
            0.0
        };
        MarkDensity::Continuous {
            kernel,
            continuous_weight: 1.0 - self.p,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Mark> {
        if self.p >= 1.0 || rng.random::<f64>() < self.p {
            return Ok(Mark::ATOM);
        }
        let l = self.f_y.sample_length_biased(rng)?;
        let u: f64 = rng.random();
        Ok(Mark { a: -u * l, l })
    }
}

pub fn mark_density(law: &MarkLaw, mark: Mark) -> MarkDensity {
    law.density(mark)
}

pub fn sample_mark<R: Rng + ?Sized>(law: &MarkLaw, rng: &mut R) -> Result<Mark> {
    law.sample(rng)
}

/// `l f_Y(l) / E[Y]`, the law of observed interval lengths.
pub fn length_biased_density(f_y: &PhaseDist, l: f64) -> Result<f64> {
    if !(l > 0.0) {
        return Err(Error::Domain {
            what: "interval length must be positive",
            value: l,
        });
    }
    Ok(f_y.length_biased_pdf(l))
}
