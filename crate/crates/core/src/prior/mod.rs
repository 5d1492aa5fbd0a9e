//! Markov point process priors on a one-dimensional window.
//!
//! The area-interaction density with respect to a unit-rate Poisson process is
//! `β^n(x) exp(-log γ · ℓ(W ∩ U_r(x)))` where `U_r(x)` is the union of closed
//! balls of radius `r` around the points and `η = 2 r log γ`.

mod birth_death;
mod cftp;

pub use birth_death::{sample_prior_bdmh, BirthDeathChain};
pub use cftp::{sample_prior_cftp, sample_prior_cftp_with, CftpConfig};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance under which two points are considered equal.
pub const POINT_TOLERANCE: f64 = 1e-12;

/// Open interval `(lo, hi)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub lo: f64,
    pub hi: f64,
}

impl Window {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::InvalidParameter(format!("window ({lo}, {hi}) is empty")));
        }
        Ok(Window { lo, hi })
    }

    pub fn unit() -> Self {
        Window { lo: 0.0, hi: 1.0 }
    }

    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo < x && x < self.hi
    }

    /// Intersection of the closed interval `[a, b]` with the window, if it
    /// has positive length.
    pub fn clip(&self, a: f64, b: f64) -> Option<(f64, f64)> {
        let s = a.max(self.lo);
        let e = b.min(self.hi);
        (e > s).then_some((s, e))
    }
}

/// Finite point configuration in a window, stored in ascending order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointPattern {
    points: Vec<f64>,
    window: Window,
}

impl PointPattern {
    pub fn new(mut points: Vec<f64>, window: Window) -> Result<Self> {
        if let Some(&x) = points.iter().find(|&&x| !window.contains(x)) {
            return Err(Error::Domain {
                what: "point outside window",
                value: x,
            });
        }
        points.sort_by(f64::total_cmp);
        if let Some(w) = points.windows(2).find(|w| w[1] - w[0] <= POINT_TOLERANCE) {
            return Err(Error::InvalidParameter(format!("duplicate point {}", w[0])));
        }
        Ok(PointPattern { points, window })
    }

    pub fn empty(window: Window) -> Self {
        PointPattern {
            points: Vec::new(),
            window,
        }
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn window(&self) -> Window {
        self.window
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn into_points(self) -> Vec<f64> {
        self.points
    }

    /// Mean distance from each point to its nearest neighbour, `None` with
    /// fewer than two points.
    pub fn mean_nearest_neighbour(&self) -> Option<f64> {
        mean_nearest_neighbour(&self.points)
    }
}

/// Mean nearest-neighbour distance of an ascending list of points.
pub fn mean_nearest_neighbour(sorted: &[f64]) -> Option<f64> {
    let n = sorted.len();
    if n < 2 {
        return None;
    }
    let total: f64 = (0..n)
        .map(|i| {
            let left = if i > 0 { sorted[i] - sorted[i - 1] } else { f64::INFINITY };
            let right = if i + 1 < n { sorted[i + 1] - sorted[i] } else { f64::INFINITY };
            left.min(right)
        })
        .sum();
    Some(total / n as f64)
}

/// Lebesgue measure of `window ∩ ⋃ [x_i - r, x_i + r]`. Input order is free.
pub fn covered_length(points: &[f64], r: f64, window: Window) -> f64 {
    if points.is_empty() {
        return 0.0;
    }
    let mut sorted = points.to_vec();
    sorted.sort_by(f64::total_cmp);
    covered_length_sorted(&sorted, r, window)
}

/// [`covered_length`] for input already in ascending order.
pub fn covered_length_sorted(sorted: &[f64], r: f64, window: Window) -> f64 {
    let mut total = 0.0;
    let mut run: Option<(f64, f64)> = None;
    for &x in sorted {
        let Some((s, e)) = window.clip(x - r, x + r) else {
            continue;
        };
        run = match run {
            Some((rs, re)) if s <= re => Some((rs, re.max(e))),
            Some((rs, re)) => {
                total += re - rs;
                Some((s, e))
            }
            None => Some((s, e)),
        };
    }
    if let Some((rs, re)) = run {
        total += re - rs;
    }
    total
}

/// Length of `window ∩ [u - r, u + r]` not already covered by the balls
/// around `sorted`.
pub fn added_coverage(sorted: &[f64], u: f64, r: f64, window: Window) -> f64 {
    let Some((s, e)) = window.clip(u - r, u + r) else {
        return 0.0;
    };
    let first = sorted.partition_point(|&x| x + r < s);
    let mut uncovered = 0.0;
    let mut cursor = s;
    for &x in &sorted[first..] {
        let bs = x - r;
        if bs > e {
            break;
        }
        if bs > cursor {
            uncovered += bs - cursor;
        }
        cursor = cursor.max(x + r);
        if cursor >= e {
            break;
        }
    }
    if cursor < e {
        uncovered += e - cursor;
    }
    uncovered
}

/// Unnormalised log density of a point configuration on a window.
///
/// Implementations return `f64::NEG_INFINITY` where the density vanishes.
pub trait PriorDensity: Send + Sync {
    fn window(&self) -> Window;

    fn log_density(&self, points: &[f64]) -> f64;

    /// Whether the density is that of a homogeneous Poisson process, in which
    /// case all single-site replacement ratios equal one.
    fn is_poisson(&self) -> bool {
        false
    }
}

/// Area-interaction (Widom–Rowlinson) process parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AreaInteraction {
    pub beta: f64,
    pub eta: f64,
    pub r: f64,
    pub window: Window,
}

impl AreaInteraction {
    pub fn new(beta: f64, eta: f64, r: f64, window: Window) -> Result<Self> {
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::InvalidParameter(format!("beta must be positive, got {beta}")));
        }
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::InvalidParameter(format!("r must be positive, got {r}")));
        }
        if !eta.is_finite() {
            return Err(Error::InvalidParameter(format!("eta must be finite, got {eta}")));
        }
        Window::new(window.lo, window.hi)?;
        Ok(AreaInteraction { beta, eta, r, window })
    }

    /// Poisson process with intensity `beta` (γ = 1).
    pub fn poisson(beta: f64, window: Window) -> Result<Self> {
        AreaInteraction::new(beta, 0.0, 1.0, window)
    }

    pub fn log_gamma(&self) -> f64 {
        self.eta / (2.0 * self.r)
    }

    pub fn gamma(&self) -> f64 {
        self.log_gamma().exp()
    }

    pub fn with_eta(&self, eta: f64) -> Self {
        AreaInteraction { eta, ..*self }
    }

    pub fn with_beta(&self, beta: f64) -> Self {
        AreaInteraction { beta, ..*self }
    }

    /// Uniform bound on the conditional intensity, `β max(1, e^{-η})`.
    pub fn dominating_rate(&self) -> f64 {
        self.beta * (-self.eta).exp().max(1.0)
    }

    pub fn log_density_unnorm(&self, x: &PointPattern) -> f64 {
        self.log_density_sorted(x.points())
    }

    fn log_density_sorted(&self, sorted: &[f64]) -> f64 {
        let n = sorted.len() as f64;
        let cov = if self.eta == 0.0 {
            0.0
        } else {
            covered_length_sorted(sorted, self.r, self.window)
        };
        n * self.beta.ln() - self.log_gamma() * cov
    }

    /// Conditional intensity of adding `u` to the ascending configuration `x`.
    pub fn conditional_intensity(&self, sorted: &[f64], u: f64) -> f64 {
        if self.eta == 0.0 {
            return self.beta;
        }
        self.beta * (-self.log_gamma() * added_coverage(sorted, u, self.r, self.window)).exp()
    }

    pub fn papangelou(&self, x: &PointPattern, u: f64) -> Result<f64> {
        if !self.window.contains(u) {
            return Err(Error::Domain {
                what: "point outside window",
                value: u,
            });
        }
        if x.points().iter().any(|&p| (p - u).abs() <= POINT_TOLERANCE) {
            return Err(Error::Domain {
                what: "point already in pattern",
                value: u,
            });
        }
        Ok(self.conditional_intensity(x.points(), u))
    }
}

impl PriorDensity for AreaInteraction {
    fn window(&self) -> Window {
        self.window
    }

    fn log_density(&self, points: &[f64]) -> f64 {
        if points.windows(2).all(|w| w[0] <= w[1]) {
            self.log_density_sorted(points)
        } else {
            let mut s = points.to_vec();
            s.sort_by(f64::total_cmp);
            self.log_density_sorted(&s)
        }
    }

    fn is_poisson(&self) -> bool {
        self.eta == 0.0
    }
}

pub fn log_density_unnorm(params: &AreaInteraction, x: &PointPattern) -> f64 {
    params.log_density_unnorm(x)
}

pub fn papangelou(params: &AreaInteraction, x: &PointPattern, u: f64) -> Result<f64> {
    params.papangelou(x, u)
}
