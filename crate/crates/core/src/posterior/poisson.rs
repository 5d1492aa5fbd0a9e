//! Closed-form posterior under a Poisson prior: the latent times are
//! independent, one per interval, with density proportional to the intensity
//! on the interval clipped to the window.

use rand::Rng;

use super::ObservedData;
use crate::error::{Error, Result};
use crate::seeded_rng;

const INVERSION_CELLS: usize = 4096;

/// Intensity function of a Poisson prior.
pub enum Intensity<'a> {
    Constant(f64),
    Function(&'a dyn Fn(f64) -> f64),
}

pub fn poisson_posterior_sample(u: &ObservedData, intensity: &Intensity<'_>, seed: u64) -> Result<Vec<f64>> {
    let mut rng = seeded_rng(seed);
    (0..u.k())
        .map(|i| {
            let (s, e) = u.support(i);
            match intensity {
                Intensity::Constant(c) => {
                    if !(*c > 0.0 && c.is_finite()) {
                        return Err(Error::Numeric(format!("interval {i} has zero intensity mass")));
                    }
                    Ok(s + rng.random::<f64>() * (e - s))
                }
                Intensity::Function(f) => sample_inverse_cdf(*f, s, e, &mut rng)
                    .ok_or_else(|| Error::Numeric(format!("interval {i} has zero intensity mass"))),
            }
        })
        .collect()
}

/// Inversion of the cumulative intensity with the density held at its
/// midpoint value on each grid cell.
fn sample_inverse_cdf<R: Rng + ?Sized>(f: &dyn Fn(f64) -> f64, s: f64, e: f64, rng: &mut R) -> Option<f64> {
    let h = (e - s) / INVERSION_CELLS as f64;
    let mut cum = Vec::with_capacity(INVERSION_CELLS + 1);
    cum.push(0.0);
    let mut acc = 0.0;
    for j in 0..INVERSION_CELLS {
        let v = f(s + (j as f64 + 0.5) * h);
        if !(v >= 0.0 && v.is_finite()) {
            return None;
        }
        acc += v * h;
        cum.push(acc);
    }
    if !(acc > 0.0) {
        return None;
    }
    let target = rng.random::<f64>() * acc;
    let j = (cum.partition_point(|&c| c <= target) - 1).min(INVERSION_CELLS - 1);
    let cell = cum[j + 1] - cum[j];
    let frac = if cell > 0.0 { (target - cum[j]) / cell } else { 0.5 };
    Some(s + (j as f64 + frac) * h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::marks::Mark;
    use crate::prior::Window;

    #[test]
    fn clipped_support() {
        let u = ObservedData::new(vec![], vec![Mark { a: -0.5, l: 0.8 }], Window::unit()).unwrap();
        for seed in 0..200 {
            let x = poisson_posterior_sample(&u, &Intensity::Constant(3.0), seed).unwrap();
            assert!(0.0 <= x[0] && x[0] <= 0.3);
        }
    }

    #[test]
    fn zero_mass_is_an_error() {
        let u = ObservedData::new(vec![], vec![Mark { a: 0.2, l: 0.3 }], Window::unit()).unwrap();
        let zero = |_: f64| 0.0;
        assert!(poisson_posterior_sample(&u, &Intensity::Function(&zero), 1).is_err());
        assert!(poisson_posterior_sample(&u, &Intensity::Constant(0.0), 1).is_err());
    }
}
