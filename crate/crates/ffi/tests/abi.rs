use std::ffi::CStr;
use std::ptr;

use aoristic_ffi::*;

fn last_error() -> String {
    let mut buf = [0 as std::ffi::c_char; 256];
    let n = unsafe { aor_last_error_message(buf.as_mut_ptr(), buf.len()) };
    assert!(n > 0);
    unsafe { CStr::from_ptr(buf.as_ptr()) }.to_string_lossy().into_owned()
}

fn toy() -> *mut AorObservedData {
    let atoms = [0.51, 0.58];
    let a = [0.45];
    let l = [0.4];
    let mut data = ptr::null_mut();
    let st = unsafe { aor_observed_new(atoms.as_ptr(), 2, a.as_ptr(), l.as_ptr(), 1, 0.0, 1.0, &mut data) };
    assert_eq!(st, AorStatus::Ok);
    data
}

#[test]
fn observed_counts_and_atom_fraction() {
    let data = toy();
    let (mut n, mut m, mut p) = (0usize, 0usize, 0.0);
    unsafe {
        assert_eq!(aor_observed_counts(data, &mut n, &mut m), AorStatus::Ok);
        assert_eq!(aor_estimate_atom_prob(data, &mut p), AorStatus::Ok);
        aor_observed_free(data);
    }
    assert_eq!((n, m), (3, 2));
    assert_eq!(p, 2.0 / 3.0);
}

#[test]
fn posterior_round_trip() {
    let data = toy();
    let mut prior = ptr::null_mut();
    let mut sample = ptr::null_mut();
    unsafe {
        assert_eq!(aor_prior_new(12.0, 0.0, 0.1, 0.0, 1.0, &mut prior), AorStatus::Ok);
        assert_eq!(aor_posterior_run(data, prior, 100, 1000, 1, 7, &mut sample), AorStatus::Ok);
        let (mut len, mut dim, mut acc) = (0usize, 0usize, 0.0);
        aor_posterior_len(sample, &mut len);
        aor_posterior_dim(sample, &mut dim);
        aor_posterior_acceptance_rate(sample, &mut acc);
        assert_eq!((len, dim, acc), (1000, 1, 1.0));
        let mut buf = [0.0f64; 1];
        let mut got = 0usize;
        assert_eq!(aor_posterior_copy_state(sample, 999, buf.as_mut_ptr(), 1, &mut got), AorStatus::Ok);
        assert_eq!(got, 1);
        assert!((0.45..=0.85).contains(&buf[0]));
        assert_eq!(
            aor_posterior_copy_state(sample, 1000, buf.as_mut_ptr(), 1, &mut got),
            AorStatus::InvalidArgument
        );
        aor_posterior_free(sample);
        aor_prior_free(prior);
        aor_observed_free(data);
    }
}

#[test]
fn cftp_sample_reports_required_length() {
    let mut prior = ptr::null_mut();
    unsafe {
        assert_eq!(aor_prior_new(12.0, 1.2, 0.05, 0.0, 1.0, &mut prior), AorStatus::Ok);
        let mut len = 0usize;
        let st = aor_prior_sample_cftp(prior, 3, ptr::null_mut(), 0, &mut len);
        assert!(st == AorStatus::Ok || st == AorStatus::BufferTooSmall);
        let mut buf = vec![0.0f64; len];
        let mut len2 = 0usize;
        assert_eq!(aor_prior_sample_cftp(prior, 3, buf.as_mut_ptr(), len, &mut len2), AorStatus::Ok);
        assert_eq!(len, len2);
        assert!(buf.windows(2).all(|w| w[0] < w[1]));
        let mut logd = 0.0;
        assert_eq!(aor_prior_log_density(prior, buf.as_ptr(), len, &mut logd), AorStatus::Ok);
        assert!(logd.is_finite());
        aor_prior_free(prior);
    }
}

#[test]
fn errors_set_codes_and_messages() {
    let mut prior = ptr::null_mut();
    let st = unsafe { aor_prior_new(-1.0, 0.0, 0.1, 0.0, 1.0, &mut prior) };
    assert_eq!(st, AorStatus::InvalidArgument);
    assert!(prior.is_null());
    assert!(last_error().contains("beta"));

    let st = unsafe { aor_observed_counts(ptr::null(), ptr::null_mut(), ptr::null_mut()) };
    assert_eq!(st, AorStatus::NullPointer);

    let lengths = [2.0; 10];
    let (mut k, mut rate) = (0.0, 0.0);
    let st = unsafe { aor_fit_gamma_lengths(lengths.as_ptr(), 10, &mut k, &mut rate) };
    assert_eq!(st, AorStatus::NumericError);

    let a = [3.0];
    let l = [1.0];
    let mut data = ptr::null_mut();
    let st = unsafe { aor_observed_new(ptr::null(), 0, a.as_ptr(), l.as_ptr(), 1, 0.0, 1.0, &mut data) };
    assert_eq!(st, AorStatus::DataError);
}

#[test]
fn assignment_count() {
    let points = [0.5, 0.6];
    let a = [0.0, 0.55];
    let l = [1.0, 0.45];
    let mut count = 0u64;
    let st = unsafe { aor_count_valid_assignments(points.as_ptr(), a.as_ptr(), l.as_ptr(), 2, &mut count) };
    assert_eq!(st, AorStatus::Ok);
    assert_eq!(count, 1);
}

#[test]
fn gamma_fit() {
    let lengths: Vec<f64> = (1..=200).map(|i| 0.5 + (i as f64 * 0.37).sin().abs() * 3.0).collect();
    let (mut k, mut rate) = (0.0, 0.0);
    let st = unsafe { aor_fit_gamma_lengths(lengths.as_ptr(), lengths.len(), &mut k, &mut rate) };
    assert_eq!(st, AorStatus::Ok);
    assert!(k > 0.0 && rate > 0.0);
}
