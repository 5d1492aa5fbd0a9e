use aoristic::estimate::{
    estimate_atom_prob, fit_forward, fit_gamma_lengths, forward_loglik, gamma_mle, prior_loglik_curve,
    prior_ratio_sample, CurveConfig, PriorSampler, PriorTheta,
};
use aoristic::marks::{Mark, MarkLaw};
use aoristic::phase::PhaseDist;
use aoristic::posterior::{MhConfig, ObservedData};
use aoristic::prior::{AreaInteraction, Window};
use aoristic::seeded_rng;
use statrs::function::gamma::digamma;

fn gamma_sample(shape: f64, rate: f64, n: usize, seed: u64) -> Vec<f64> {
    let g = PhaseDist::gamma(shape, rate).unwrap();
    let mut rng = seeded_rng(seed);
    (0..n).map(|_| g.sample(&mut rng).unwrap()).collect()
}

fn toy() -> ObservedData {
    ObservedData::new(vec![0.51, 0.58], vec![Mark { a: 0.45, l: 0.4 }], Window::unit()).unwrap()
}

/// Observed marks at many latent times spread over a long window.
fn simulated_marks(law: &MarkLaw, n: usize, seed: u64) -> ObservedData {
    let mut rng = seeded_rng(seed);
    let window = Window::new(0.0, 1e9).unwrap();
    let mut atoms = Vec::new();
    let mut intervals = Vec::new();
    for i in 0..n {
        let t = 1e6 + i as f64 * 1e3;
        let m = law.sample(&mut rng).unwrap().at(t);
        if m.is_atom() {
            atoms.push(m.a);
        } else {
            intervals.push(m);
        }
    }
    ObservedData::new(atoms, intervals, window).unwrap()
}

#[test]
fn atom_probability_is_exact_ratio() {
    assert_eq!(estimate_atom_prob(&toy()).unwrap(), 2.0 / 3.0);
    let all_atoms = ObservedData::new(vec![0.1, 0.2], vec![], Window::unit()).unwrap();
    assert_eq!(estimate_atom_prob(&all_atoms).unwrap(), 1.0);
    let none = ObservedData::new(vec![], vec![Mark { a: 0.1, l: 0.2 }], Window::unit()).unwrap();
    assert_eq!(estimate_atom_prob(&none).unwrap(), 0.0);
    let empty = ObservedData::new(vec![], vec![], Window::unit()).unwrap();
    assert!(estimate_atom_prob(&empty).is_err());
}

#[test]
fn gamma_fit_of_length_biased_exponential() {
    let fit = fit_gamma_lengths(&gamma_sample(2.0, 1.0, 100_000, 51)).unwrap();
    assert!((fit.shape - 1.0).abs() < 0.02, "{fit:?}");
    assert!((fit.rate - 1.0).abs() < 0.02, "{fit:?}");
}

#[test]
fn gamma_fit_recovers_slow_rate_parameters() {
    let fit = fit_gamma_lengths(&gamma_sample(3.5, 0.07, 100_000, 52)).unwrap();
    assert!((fit.shape / 2.5 - 1.0).abs() < 0.02);
    assert!((fit.rate / 0.07 - 1.0).abs() < 0.02);
}

#[test]
fn digamma_residual_is_tiny() {
    for (shape, rate, seed) in [(1.5, 2.0, 1), (3.5, 0.07, 2), (20.0, 5.0, 3), (1.05, 1.0, 4)] {
        let xs = gamma_sample(shape, rate, 5_000, seed);
        let fit = gamma_mle(&xs).unwrap();
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let s = mean.ln() - xs.iter().map(|x| x.ln()).sum::<f64>() / n;
        let residual = fit.shape.ln() - digamma(fit.shape) - s;
        assert!(residual.abs() < 1e-10, "shape={shape}: {residual}");
        assert!(fit.iterations <= 100);
    }
}

#[test]
fn error_shrinks_with_sample_size() {
    // mean absolute error over replicates at N and 4N: ratio ≈ 2
    let err = |n: usize| {
        (0..40u64)
            .map(|r| (fit_gamma_lengths(&gamma_sample(3.5, 1.0, n, 1000 + r * 7 + n as u64)).unwrap().shape - 2.5).abs())
            .sum::<f64>()
            / 40.0
    };
    let small = err(2_000);
    let large = err(8_000);
    let ratio = small / large;
    assert!(ratio > 1.3 && ratio < 3.0, "ratio={ratio}");
}

#[test]
fn degenerate_and_inconsistent_inputs() {
    assert!(matches!(fit_gamma_lengths(&[3.0; 20]), Err(aoristic::Error::Numeric(_))));
    assert!(matches!(
        fit_gamma_lengths(&gamma_sample(0.5, 1.0, 5_000, 9)),
        Err(aoristic::Error::Model(_))
    ));
}

#[test]
fn loglik_is_separable() {
    let law = MarkLaw::new(0.3, PhaseDist::gamma(2.5, 2.0).unwrap()).unwrap();
    let u = simulated_marks(&law, 500, 61);
    let f_y = PhaseDist::gamma(2.2, 1.7).unwrap();
    let p: f64 = 0.35;
    let atom_term = u.m() as f64 * p.ln() + u.k() as f64 * (1.0 - p).ln();
    let interval_terms: f64 = u.intervals().iter().map(|iv| (f_y.pdf(iv.l) / f_y.mean()).ln()).sum();
    let total = forward_loglik(&u, p, &f_y);
    assert!((total - atom_term - interval_terms).abs() < 1e-9 * total.abs());
}

#[test]
fn loglik_maximised_at_atom_fraction() {
    let law = MarkLaw::new(0.3, PhaseDist::gamma(2.5, 2.0).unwrap()).unwrap();
    let u = simulated_marks(&law, 400, 62);
    let f_y = PhaseDist::gamma(2.5, 2.0).unwrap();
    let p_hat = estimate_atom_prob(&u).unwrap();
    let best = (1..1000)
        .map(|i| i as f64 / 1000.0)
        .max_by(|a, b| forward_loglik(&u, *a, &f_y).total_cmp(&forward_loglik(&u, *b, &f_y)))
        .unwrap();
    assert!((best - p_hat).abs() <= 0.001);
    let atoms = ObservedData::new(vec![0.1, 0.3], vec![], Window::unit()).unwrap();
    assert_eq!(forward_loglik(&atoms, 1.0, &f_y), 0.0);
    assert_eq!(forward_loglik(&u, 1.0, &f_y), f64::NEG_INFINITY);
}

#[test]
fn fitted_parameters_dominate_perturbations() {
    let law = MarkLaw::new(0.2, PhaseDist::gamma(2.5, 0.07).unwrap()).unwrap();
    let u = simulated_marks(&law, 2_000, 63);
    let fit = fit_forward(&u).unwrap();
    let f_y = fit.phase().unwrap();
    let best = forward_loglik(&u, fit.p_hat, &f_y);
    assert!((fit.loglik.unwrap() - best).abs() < 1e-9 * best.abs());
    assert!(best >= forward_loglik(&u, fit.p_hat + 0.05, &f_y));
    assert!(best >= forward_loglik(&u, fit.p_hat, &PhaseDist::gamma(fit.shape.unwrap() * 1.05, fit.rate.unwrap()).unwrap()));
    assert!(best >= forward_loglik(&u, fit.p_hat, &PhaseDist::gamma(fit.shape.unwrap(), fit.rate.unwrap() * 0.95).unwrap()));
    assert!((fit.shape.unwrap() / 2.5 - 1.0).abs() < 4.0 * fit.shape_se.unwrap() / 2.5);
}

#[test]
fn curve_is_zero_at_reference_for_any_seed() {
    let u = toy();
    let reference = AreaInteraction::new(12.0, 0.0, 0.1, Window::unit()).unwrap();
    let cfg = CurveConfig {
        mcmc: MhConfig { burnin: 500, sweeps: 5_000, thin: 5, ..MhConfig::default() },
        prior_samples: 500,
        ..CurveConfig::default()
    };
    for seed in [1, 2, 3] {
        let curve = prior_loglik_curve(&u, &[-0.6, 0.0, 0.6], PriorTheta::Eta, &reference, &cfg, seed).unwrap();
        assert_eq!(curve.l_values[1], 0.0);
        assert_eq!(curve.mc_error[1], 0.0);
        assert!(curve.l_values.iter().all(|v| v.is_finite()));
    }
}

#[test]
fn beta_ratio_matches_poisson_generating_function() {
    // E[(β/β₀)^N] with N ~ Poisson(β₀ℓ) is exp(β₀ℓ(β/β₀ - 1)).
    let beta0 = 12.0;
    let reference = AreaInteraction::new(beta0, 0.0, 0.05, Window::unit()).unwrap();
    let sample = prior_ratio_sample(PriorTheta::Beta, &reference, 100_000, PriorSampler::Cftp, 71).unwrap();
    for beta in [9.0, 11.0, 13.0, 15.0] {
        let est = sample.log_mean_ratio(beta, 20);
        let exact = beta0 * (beta / beta0 - 1.0);
        assert!((est.value - exact).abs() < 3.0 * est.se, "beta={beta}: {} vs {exact} (se {})", est.value, est.se);
    }
}

#[test]
fn curve_rejects_bad_grids() {
    let u = toy();
    let reference = AreaInteraction::new(12.0, 0.0, 0.1, Window::unit()).unwrap();
    let cfg = CurveConfig::default();
    assert!(prior_loglik_curve(&u, &[], PriorTheta::Eta, &reference, &cfg, 1).is_err());
    assert!(prior_loglik_curve(&u, &[-1.0, 12.0], PriorTheta::Beta, &reference, &cfg, 1).is_err());
}
