//! C ABI for the `aoristic` crate.
//!
//! Objects cross the boundary as opaque handles created by `*_new` / `*_run`
//! functions and released by the matching `*_free`. Every function returns an
//! [`AorStatus`]; on failure a message is available from
//! [`aor_last_error_message`] on the same thread. Output arrays are written
//! into caller buffers: when a buffer is too small the required length is
//! still reported and `AOR_STATUS_BUFFER_TOO_SMALL` is returned.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use aoristic::estimate::{estimate_atom_prob, fit_gamma_lengths};
use aoristic::marks::Mark;
use aoristic::posterior::{count_valid_assignments, mh_state_estimation, MhConfig, ObservedData, PosteriorSample};
use aoristic::prior::{sample_prior_cftp, AreaInteraction, PointPattern, Window};
use aoristic::Error;

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AorStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DataError = 3,
    NumericError = 4,
    BufferTooSmall = 5,
    Panic = 6,
}

/// Observed atoms and intervals on a window.
pub struct AorObservedData(ObservedData);

/// Area-interaction prior.
pub struct AorPrior(AreaInteraction);

/// Output of the posterior sampler.
pub struct AorPosteriorSample(PosteriorSample);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> AorStatus {
    match err {
        Error::DistributionParameter(_) | Error::InvalidParameter(_) | Error::Config(_) | Error::TooLarge { .. } => {
            AorStatus::InvalidArgument
        }
        Error::Domain { .. }
        | Error::OutOfRange { .. }
        | Error::Inconsistent(_)
        | Error::Parse { .. }
        | Error::OutsideWindow { .. }
        | Error::EmptyData
        | Error::Io(_) => AorStatus::DataError,
        Error::Numeric(_) | Error::Model(_) | Error::NonCoalescence { .. } | Error::Initialisation { .. } => {
            AorStatus::NumericError
        }
    }
}

fn guard<F: FnOnce() -> Result<(), (AorStatus, String)>>(f: F) -> AorStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => AorStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("panic inside aoristic".into());
            AorStatus::Panic
        }
    }
}

fn lib<T>(r: aoristic::Result<T>) -> Result<T, (AorStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null(what: &str) -> (AorStatus, String) {
    (AorStatus::NullPointer, format!("{what} is null"))
}

unsafe fn input<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], (AorStatus, String)> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(slice::from_raw_parts(p, len))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, (AorStatus, String)> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn write_out<T>(out: *mut T, value: T, what: &str) -> Result<(), (AorStatus, String)> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

unsafe fn copy_into(src: &[f64], buf: *mut f64, cap: usize, out_len: *mut usize) -> Result<(), (AorStatus, String)> {
    write_out(out_len, src.len(), "out_len")?;
    if src.len() > cap {
        return Err((
            AorStatus::BufferTooSmall,
            format!("buffer holds {cap} values, {} needed", src.len()),
        ));
    }
    if !src.is_empty() {
        if buf.is_null() {
            return Err(null("buf"));
        }
        ptr::copy_nonoverlapping(src.as_ptr(), buf, src.len());
    }
    Ok(())
}

/// Copies the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `cap`). Returns the full message length excluding the NUL,
/// or 0 when there is none.
///
/// # Safety
/// `buf` must be valid for `cap` bytes or null.
#[no_mangle]
pub unsafe extern "C" fn aor_last_error_message(buf: *mut c_char, cap: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let Some(msg) = e.as_ref() else { return 0 };
        let bytes = msg.as_bytes();
        if !buf.is_null() && cap > 0 {
            let n = bytes.len().min(cap - 1);
            ptr::copy_nonoverlapping(bytes.as_ptr() as *const c_char, buf, n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// Builds observed data from `n_atoms` atom times and `n_intervals`
/// intervals `[a[i], a[i] + l[i]]` on the window `(lo, hi)`.
///
/// # Safety
/// Array arguments must be valid for their stated lengths; `out` must be a
/// valid pointer.
#[no_mangle]
pub unsafe extern "C" fn aor_observed_new(
    atoms: *const f64,
    n_atoms: usize,
    a: *const f64,
    l: *const f64,
    n_intervals: usize,
    lo: f64,
    hi: f64,
    out: *mut *mut AorObservedData,
) -> AorStatus {
    guard(|| {
        let atoms = input(atoms, n_atoms, "atoms")?.to_vec();
        let a = input(a, n_intervals, "a")?;
        let l = input(l, n_intervals, "l")?;
        let intervals = a.iter().zip(l).map(|(&a, &l)| Mark { a, l }).collect();
        let window = lib(Window::new(lo, hi))?;
        let data = lib(ObservedData::new(atoms, intervals, window))?;
        write_out(out, Box::into_raw(Box::new(AorObservedData(data))), "out")
    })
}

/// # Safety
/// `data` must come from [`aor_observed_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn aor_observed_free(data: *mut AorObservedData) {
    if !data.is_null() {
        drop(Box::from_raw(data));
    }
}

/// Number of observations `n` and of atoms `m`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn aor_observed_counts(data: *const AorObservedData, n: *mut usize, m: *mut usize) -> AorStatus {
    guard(|| {
        let d = &handle(data, "data")?.0;
        write_out(n, d.n(), "n")?;
        write_out(m, d.m(), "m")
    })
}

/// Atom fraction `m / n`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn aor_estimate_atom_prob(data: *const AorObservedData, out: *mut f64) -> AorStatus {
    guard(|| {
        let d = &handle(data, "data")?.0;
        write_out(out, lib(estimate_atom_prob(d))?, "out")
    })
}

/// Area-interaction prior with intensity `beta`, interaction `eta`, radius
/// `r` on the window `(lo, hi)`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn aor_prior_new(
    beta: f64,
    eta: f64,
    r: f64,
    lo: f64,
    hi: f64,
    out: *mut *mut AorPrior,
) -> AorStatus {
    guard(|| {
        let window = lib(Window::new(lo, hi))?;
        let prior = lib(AreaInteraction::new(beta, eta, r, window))?;
        write_out(out, Box::into_raw(Box::new(AorPrior(prior))), "out")
    })
}

/// # Safety
/// `prior` must come from [`aor_prior_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn aor_prior_free(prior: *mut AorPrior) {
    if !prior.is_null() {
        drop(Box::from_raw(prior));
    }
}

/// Unnormalised log density of the pattern `points[0..n]`.
///
/// # Safety
/// `points` must be valid for `n` values; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn aor_prior_log_density(
    prior: *const AorPrior,
    points: *const f64,
    n: usize,
    out: *mut f64,
) -> AorStatus {
    guard(|| {
        let p = &handle(prior, "prior")?.0;
        let pattern = lib(PointPattern::new(input(points, n, "points")?.to_vec(), p.window))?;
        write_out(out, p.log_density_unnorm(&pattern), "out")
    })
}

/// Perfect draw from the prior; points are written in ascending order.
///
/// # Safety
/// `buf` must be valid for `cap` values; `out_len` must be valid.
#[no_mangle]
pub unsafe extern "C" fn aor_prior_sample_cftp(
    prior: *const AorPrior,
    seed: u64,
    buf: *mut f64,
    cap: usize,
    out_len: *mut usize,
) -> AorStatus {
    guard(|| {
        let p = &handle(prior, "prior")?.0;
        let pattern = lib(sample_prior_cftp(p, seed))?;
        copy_into(pattern.points(), buf, cap, out_len)
    })
}

/// Runs the single-site Metropolis–Hastings sampler for the latent times.
///
/// # Safety
/// Handles must be valid; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn aor_posterior_run(
    data: *const AorObservedData,
    prior: *const AorPrior,
    burnin: usize,
    sweeps: usize,
    thin: usize,
    seed: u64,
    out: *mut *mut AorPosteriorSample,
) -> AorStatus {
    guard(|| {
        let d = &handle(data, "data")?.0;
        let p = &handle(prior, "prior")?.0;
        let cfg = MhConfig {
            burnin,
            sweeps,
            thin,
            ..MhConfig::default()
        };
        let sample = lib(mh_state_estimation(d, p, &cfg, seed))?;
        write_out(out, Box::into_raw(Box::new(AorPosteriorSample(sample))), "out")
    })
}

/// # Safety
/// `sample` must come from [`aor_posterior_run`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn aor_posterior_free(sample: *mut AorPosteriorSample) {
    if !sample.is_null() {
        drop(Box::from_raw(sample));
    }
}

/// Number of recorded states.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn aor_posterior_len(sample: *const AorPosteriorSample, out: *mut usize) -> AorStatus {
    guard(|| write_out(out, handle(sample, "sample")?.0.len(), "out"))
}

/// Number of latent times per state.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn aor_posterior_dim(sample: *const AorPosteriorSample, out: *mut usize) -> AorStatus {
    guard(|| write_out(out, handle(sample, "sample")?.0.dim(), "out"))
}

/// Fraction of accepted proposals.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn aor_posterior_acceptance_rate(sample: *const AorPosteriorSample, out: *mut f64) -> AorStatus {
    guard(|| write_out(out, handle(sample, "sample")?.0.acceptance_rate(), "out"))
}

/// Copies recorded state `index` (one value per interval, in data order).
///
/// # Safety
/// `buf` must be valid for `cap` values; other pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn aor_posterior_copy_state(
    sample: *const AorPosteriorSample,
    index: usize,
    buf: *mut f64,
    cap: usize,
    out_len: *mut usize,
) -> AorStatus {
    guard(|| {
        let s = &handle(sample, "sample")?.0;
        if index >= s.len() {
            return Err((
                AorStatus::InvalidArgument,
                format!("state {index} out of range ({} recorded)", s.len()),
            ));
        }
        copy_into(s.state(index), buf, cap, out_len)
    })
}

/// Fits the Y-phase Gamma law from observed interval lengths.
///
/// # Safety
/// `lengths` must be valid for `n` values; outputs must be valid.
#[no_mangle]
pub unsafe extern "C" fn aor_fit_gamma_lengths(
    lengths: *const f64,
    n: usize,
    shape: *mut f64,
    rate: *mut f64,
) -> AorStatus {
    guard(|| {
        let fit = lib(fit_gamma_lengths(input(lengths, n, "lengths")?))?;
        write_out(shape, fit.shape, "shape")?;
        write_out(rate, fit.rate, "rate")
    })
}

/// Number of ways to assign `k` points to `k` intervals `[a[i], a[i]+l[i]]`
/// with every point inside its interval.
///
/// # Safety
/// Arrays must be valid for `k` values; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn aor_count_valid_assignments(
    points: *const f64,
    a: *const f64,
    l: *const f64,
    k: usize,
    out: *mut u64,
) -> AorStatus {
    guard(|| {
        let points = input(points, k, "points")?;
        let a = input(a, k, "a")?;
        let l = input(l, k, "l")?;
        let intervals: Vec<Mark> = a.iter().zip(l).map(|(&a, &l)| Mark { a, l }).collect();
        write_out(out, lib(count_valid_assignments(points, &intervals))?, "out")
    })
}
