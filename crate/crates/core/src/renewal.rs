//! Alternating renewal censoring mechanism.
//!
//! A cycle consists of a Y-phase (events are observed only up to the phase
//! boundaries) followed by a Z-phase (events are observed exactly). Cycle
//! lengths `T = Y + Z` generate renewals `S_0 = 0 < S_1 < ...`.
//!
//! Phase membership uses half-open intervals `[start, end)`, so a point sitting
//! exactly on a boundary belongs to the phase on its right.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::phase::PhaseDist;
use crate::{seeded_rng, SimRng};

/// Phase laws of one cycle. Y and Z are drawn independently.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RenewalSpec {
    pub y: PhaseDist,
    pub z: PhaseDist,
}

impl RenewalSpec {
    pub fn new(y: PhaseDist, z: PhaseDist) -> Result<Self> {
        y.validate()?;
        z.validate()?;
        let spec = RenewalSpec { y, z };
        let m = spec.mean_cycle();
        if !(m.is_finite() && m > 0.0) {
            return Err(Error::DistributionParameter(format!(
                "mean cycle length {m} must be finite and positive"
            )));
        }
        Ok(spec)
    }

    pub fn mean_cycle(&self) -> f64 {
        self.y.mean() + self.z.mean()
    }

    /// Limiting probability that a point is observed exactly, `E[Z]/E[T]`.
    pub fn atom_probability(&self) -> f64 {
        self.z.mean() / self.mean_cycle()
    }
}

/// Renewal epochs and Y/Z split points of a simulated path.
#[derive(Debug, Clone, PartialEq)]
pub struct RenewalTrajectory {
    renewals: Vec<f64>,
    splits: Vec<f64>,
}

impl RenewalTrajectory {
    /// Builds a trajectory from explicit `(y, z)` phase lengths.
    pub fn from_cycles(cycles: &[(f64, f64)]) -> Result<Self> {
        let mut renewals = Vec::with_capacity(cycles.len() + 1);
        let mut splits = Vec::with_capacity(cycles.len());
        let mut s = 0.0;
        renewals.push(s);
        for &(y, z) in cycles {
            if !(y > 0.0 && z > 0.0 && y.is_finite() && z.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "phase lengths must be positive, got ({y}, {z})"
                )));
            }
            splits.push(s + y);
            s += y + z;
            renewals.push(s);
        }
        Ok(RenewalTrajectory { renewals, splits })
    }

    /// Renewal epochs `S_0 = 0, S_1, ...`.
    pub fn renewals(&self) -> &[f64] {
        &self.renewals
    }

    /// End of the Y-phase in each cycle.
    pub fn splits(&self) -> &[f64] {
        &self.splits
    }

    /// Right end of the simulated time range.
    pub fn covered_until(&self) -> f64 {
        *self.renewals.last().unwrap_or(&0.0)
    }

    /// `N(t)`: number of renewals `S_n <= t` with `n >= 1`.
    pub fn count_renewals(&self, t: f64) -> usize {
        self.renewals[1..].partition_point(|&s| s <= t)
    }

    /// Whether `t` falls in a Z-phase (exact observation).
    pub fn in_z_phase(&self, t: f64) -> Option<bool> {
        if !(0.0..self.covered_until()).contains(&t) {
            return None;
        }
        let cycle = self.renewals.partition_point(|&s| s <= t) - 1;
        Some(t >= self.splits[cycle])
    }
}

/// Age and excess of `t` with respect to the current Y-phase.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AgeExcess {
    pub age: f64,
    pub excess: f64,
    pub is_atom: bool,
}

impl AgeExcess {
    pub const ATOM: AgeExcess = AgeExcess {
        age: 0.0,
        excess: 0.0,
        is_atom: true,
    };
}

pub fn simulate_trajectory(spec: &RenewalSpec, horizon: f64, seed: u64) -> Result<RenewalTrajectory> {
    let mut rng = seeded_rng(seed);
    simulate_trajectory_with(spec, horizon, &mut rng)
}

/// Simulates cycles until the last renewal lies strictly beyond `horizon`.
pub fn simulate_trajectory_with<R: Rng + ?Sized>(
    spec: &RenewalSpec,
    horizon: f64,
    rng: &mut R,
) -> Result<RenewalTrajectory> {
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(Error::Domain {
            what: "horizon must be positive and finite",
            value: horizon,
        });
    }
    let mut renewals = vec![0.0];
    let mut splits = Vec::new();
    let mut s = 0.0;
    while s <= horizon {
        let y = spec.y.sample(rng)?;
        let z = spec.z.sample(rng)?;
        splits.push(s + y);
        s += y + z;
        renewals.push(s);
    }
    Ok(RenewalTrajectory { renewals, splits })
}

pub fn censor_point(t: f64, traj: &RenewalTrajectory) -> Result<AgeExcess> {
    let covered = traj.covered_until();
    if !(t >= 0.0 && t < covered) {
        return Err(Error::OutOfRange { t, covered });
    }
    let cycle = traj.renewals.partition_point(|&s| s <= t) - 1;
    let split = traj.splits[cycle];
    if t >= split {
        Ok(AgeExcess::ATOM)
    } else {
        Ok(AgeExcess {
            age: t - traj.renewals[cycle],
            excess: split - t,
            is_atom: false,
        })
    }
}

/// Simulates a fresh path covering `t` and censors `t` on it.
pub fn censor_fresh<R: Rng + ?Sized>(spec: &RenewalSpec, t: f64, rng: &mut R) -> Result<AgeExcess> {
    if t < 0.0 {
        return Err(Error::Domain {
            what: "censoring time must be nonnegative",
            value: t,
        });
    }
    // Walk cycles without storing them.
    let mut s = 0.0;
    loop {
        let y = spec.y.sample(rng)?;
        let z = spec.z.sample(rng)?;
        if t < s + y {
            return Ok(AgeExcess {
                age: t - s,
                excess: s + y - t,
                is_atom: false,
            });
        }
        if t < s + y + z {
            return Ok(AgeExcess::ATOM);
        }
        s += y + z;
    }
}

/// Renewal function `M(t) = E N(t)` tabulated on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct RenewalFunction {
    step: f64,
    values: Vec<f64>,
    warning: Option<String>,
}

impl RenewalFunction {
    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn t_max(&self) -> f64 {
        self.step * (self.values.len() - 1) as f64
    }

    pub fn warning(&self) -> Option<&str> {
        self.warning.as_deref()
    }

    /// Linear interpolation of the tabulated values.
    pub fn at(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        let pos = t / self.step;
        let i = pos.floor() as usize;
        if i + 1 >= self.values.len() {
            return *self.values.last().unwrap();
        }
        let w = pos - i as f64;
        self.values[i] * (1.0 - w) + self.values[i + 1] * w
    }

    /// Midpoint-rule Stieltjes integral `∫_a^b g(s) dM(s)`, with cells clipped
    /// to `[a, b]` and `M` linearly interpolated inside cells.
    pub fn stieltjes<G: Fn(f64) -> f64>(&self, a: f64, b: f64, g: G) -> f64 {
        let a = a.max(0.0);
        if b <= a {
            return 0.0;
        }
        let h = self.step;
        let first = (a / h).floor() as usize;
        let last = ((b / h).ceil() as usize).min(self.values.len() - 1);
        let mut acc = 0.0;
        for j in first..last {
            let lo = (j as f64 * h).max(a);
            let hi = ((j + 1) as f64 * h).min(b);
            if hi <= lo {
                continue;
            }
            let dm = self.at(hi) - self.at(lo);
            acc += g(0.5 * (lo + hi)) * dm;
        }
        acc
    }
}

/// Solves `M(t) = F_T(t) + ∫_0^t M(t-s) dF_T(s)` with a trapezoidal
/// Volterra scheme on `[0, t_max]`.
pub fn solve_renewal_function(spec: &RenewalSpec, t_max: f64, step: f64) -> Result<RenewalFunction> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::Domain {
            what: "grid step must be positive",
            value: step,
        });
    }
    if !(t_max > 0.0 && t_max.is_finite()) {
        return Err(Error::Domain {
            what: "grid end must be positive",
            value: t_max,
        });
    }
    let mean = spec.mean_cycle();
    let warning = (step > mean / 10.0).then(|| {
        format!("grid step {step} is coarse relative to mean cycle length {mean}")
    });
    let n = (t_max / step).ceil() as usize;
    let h = step;

    // F_T(t_i) = Σ_j F_Y(t_i - s_{j-1/2}) [F_Z(s_j) - F_Z(s_{j-1})]
    let fy_mid: Vec<f64> = (0..n).map(|k| spec.y.cdf((k as f64 + 0.5) * h)).collect();
    let dz: Vec<f64> = (1..=n)
        .map(|j| spec.z.cdf(j as f64 * h) - spec.z.cdf((j - 1) as f64 * h))
        .collect();
    let mut ft = vec![0.0; n + 1];
    for i in 1..=n {
        let mut acc = 0.0;
        for j in 1..=i {
            acc += fy_mid[i - j] * dz[j - 1];
        }
        ft[i] = acc.min(1.0);
    }
    let df: Vec<f64> = (1..=n).map(|j| ft[j] - ft[j - 1]).collect();

    let mut m = vec![0.0; n + 1];
    let diag = 1.0 - 0.5 * df[0];
    for i in 1..=n {
        let mut acc = ft[i] + 0.5 * m[i - 1] * df[0];
        for j in 2..=i {
            acc += 0.5 * (m[i - j] + m[i - j + 1]) * df[j - 1];
        }
        m[i] = acc / diag;
    }
    // Keep the discrete solution monotone in the presence of rounding.
    for i in 1..=n {
        if m[i] < m[i - 1] {
            m[i] = m[i - 1];
        }
    }
    Ok(RenewalFunction {
        step: h,
        values: m,
        warning,
    })
}

/// Size of the atom of `(A(t), B(t))` at the origin.
pub fn atom_mass(spec: &RenewalSpec, t: f64, m: &RenewalFunction) -> Result<f64> {
    check_grid(t, m)?;
    let fy = |x: f64| spec.y.cdf(x);
    let integral = m.stieltjes(0.0, t, |s| 1.0 - fy(t - s));
    Ok((fy(t) - integral).clamp(0.0, 1.0))
}

/// `P(A(t) <= u, B(t) <= v)` for `0 <= u <= t`, `v >= 0` (`v` may be infinite).
pub fn age_excess_cdf(spec: &RenewalSpec, t: f64, u: f64, v: f64, m: &RenewalFunction) -> Result<f64> {
    check_grid(t, m)?;
    if !(0.0..=t).contains(&u) {
        return Err(Error::Domain {
            what: "age bound must lie in [0, t]",
            value: u,
        });
    }
    if v.is_nan() || v < 0.0 {
        return Err(Error::Domain {
            what: "excess bound must be nonnegative",
            value: v,
        });
    }
    let fy = |x: f64| if x.is_infinite() { 1.0 } else { spec.y.cdf(x) };
    let c = fy(t) - m.stieltjes(0.0, t, |s| 1.0 - fy(t - s));
    let boundary = if u == t { fy(t + v) - fy(t) } else { 0.0 };
    let body = m.stieltjes(t - u, t, |s| fy(t + v - s) - fy(t - s));
    Ok((c + boundary + body).clamp(0.0, 1.0))
}

fn check_grid(t: f64, m: &RenewalFunction) -> Result<()> {
    if !(t >= 0.0) {
        return Err(Error::Domain {
            what: "time must be nonnegative",
            value: t,
        });
    }
    if t > m.t_max() + 1e-9 * m.step() {
        return Err(Error::OutOfRange {
            t,
            covered: m.t_max(),
        });
    }
    Ok(())
}

/// Empirical mean of `N(t)` over independent simulated paths.
pub fn simulate_mean_count(spec: &RenewalSpec, t: f64, reps: usize, seed: u64) -> Result<(f64, f64)> {
    let mut rng: SimRng = seeded_rng(seed);
    let mut sum = 0.0;
    let mut sum2 = 0.0;
    for _ in 0..reps {
        let mut s = 0.0;
        let mut count = 0usize;
        loop {
            s += spec.y.sample(&mut rng)? + spec.z.sample(&mut rng)?;
            if s > t {
                break;
            }
            count += 1;
        }
        let c = count as f64;
        sum += c;
        sum2 += c * c;
    }
    let n = reps as f64;
    let mean = sum / n;
    let var = (sum2 / n - mean * mean).max(0.0) * n / (n - 1.0).max(1.0);
    Ok((mean, (var / n).sqrt()))
}
