use aoristic::prior::{
    covered_length, mean_nearest_neighbour, sample_prior_bdmh, sample_prior_cftp, AreaInteraction, BirthDeathChain,
    PointPattern, Window,
};
use aoristic::stats::{chi_square_gof, mean_se};
use proptest::prelude::*;
use statrs::distribution::{Discrete, Poisson};

fn pattern_strategy(max: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.001f64..0.999, 0..max).prop_map(|mut v| {
        v.sort_by(f64::total_cmp);
        v.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
        v
    })
}

proptest! {
    #[test]
    fn local_stability(x in pattern_strategy(30), u in 0.001f64..0.999, eta in -3.0f64..3.0, r in 0.005f64..0.3) {
        let params = AreaInteraction::new(12.0, eta, r, Window::unit()).unwrap();
        let pat = PointPattern::new(x, Window::unit()).unwrap();
        if let Ok(lambda) = params.papangelou(&pat, u) {
            prop_assert!(lambda <= params.dominating_rate() * (1.0 + 1e-12));
            prop_assert!(lambda > 0.0);
        }
    }

    #[test]
    fn papangelou_is_density_ratio(x in pattern_strategy(30), u in 0.001f64..0.999, eta in -3.0f64..3.0, r in 0.005f64..0.3) {
        let params = AreaInteraction::new(7.0, eta, r, Window::unit()).unwrap();
        let pat = PointPattern::new(x.clone(), Window::unit()).unwrap();
        if let Ok(lambda) = params.papangelou(&pat, u) {
            let mut y = x;
            y.push(u);
            let bigger = PointPattern::new(y, Window::unit()).unwrap();
            let diff = params.log_density_unnorm(&bigger) - params.log_density_unnorm(&pat);
            prop_assert!((diff - lambda.ln()).abs() <= 1e-12 * diff.abs().max(1.0));
        }
    }

    #[test]
    fn attractive_monotonicity(
        x in pattern_strategy(20),
        extra in pattern_strategy(20),
        u in 0.001f64..0.999,
        eta in 0.0f64..3.0,
        r in 0.005f64..0.3,
    ) {
        let params = AreaInteraction::new(12.0, eta, r, Window::unit()).unwrap();
        let mut bigger = x.clone();
        bigger.extend(extra);
        bigger.sort_by(f64::total_cmp);
        bigger.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
        let small = PointPattern::new(x, Window::unit()).unwrap();
        let large = PointPattern::new(bigger, Window::unit()).unwrap();
        if let (Ok(a), Ok(b)) = (params.papangelou(&small, u), params.papangelou(&large, u)) {
            prop_assert!(a <= b * (1.0 + 1e-12));
        }
    }

    #[test]
    fn coverage_permutation_invariant(mut x in prop::collection::vec(-0.5f64..1.5, 0..40), r in 0.001f64..0.5, seed in any::<u64>()) {
        let w = Window::unit();
        let before = covered_length(&x, r, w);
        let mut rng = aoristic::seeded_rng(seed);
        rand::seq::SliceRandom::shuffle(x.as_mut_slice(), &mut rng);
        prop_assert!((covered_length(&x, r, w) - before).abs() < 1e-12);
        prop_assert!(before <= w.length().min(2.0 * r * x.len() as f64) + 1e-12);
    }

    #[test]
    fn coverage_additive_for_separated_groups(
        left in prop::collection::vec(0.0f64..1.0, 1..15),
        right in prop::collection::vec(0.0f64..1.0, 1..15),
        r in 0.01f64..0.2,
    ) {
        let w = Window::new(-10.0, 10.0).unwrap();
        let a: Vec<f64> = left.iter().map(|v| v - 3.0).collect();
        let b: Vec<f64> = right.iter().map(|v| v + 2.0 + 2.0 * r).collect();
        let mut both = a.clone();
        both.extend(&b);
        let sum = covered_length(&a, r, w) + covered_length(&b, r, w);
        prop_assert!((covered_length(&both, r, w) - sum).abs() < 1e-12);
    }
}

#[test]
fn coverage_examples() {
    let w = Window::unit();
    assert!((covered_length(&[0.5], 0.05, w) - 0.1).abs() < 1e-15);
    assert!((covered_length(&[0.5, 0.52], 0.05, w) - 0.12).abs() < 1e-15);
    assert!((covered_length(&[0.02], 0.05, w) - 0.07).abs() < 1e-15);
}

#[test]
fn papangelou_examples() {
    let params = AreaInteraction::new(12.0, 1.2, 0.05, Window::unit()).unwrap();
    let x = PointPattern::new(vec![0.2, 0.8], Window::unit()).unwrap();
    let isolated = params.papangelou(&x, 0.5).unwrap();
    assert!((isolated - 12.0 * (-1.2f64).exp()).abs() < 1e-12);
    let dense = PointPattern::new(vec![0.45, 0.5, 0.55], Window::unit()).unwrap();
    assert!((params.papangelou(&dense, 0.501).unwrap() - 12.0).abs() < 1e-12);
    assert!(params.papangelou(&x, 1.5).is_err());
    assert!(params.papangelou(&x, 0.2).is_err());
    let poisson = AreaInteraction::new(12.0, 0.0, 0.05, Window::unit()).unwrap();
    assert_eq!(poisson.papangelou(&x, 0.3).unwrap(), 12.0);
}

#[test]
fn parameters_round_trip_gamma() {
    let p = AreaInteraction::new(12.0, 1.2, 0.05, Window::unit()).unwrap();
    assert!((2.0 * p.r * p.gamma().ln() - 1.2).abs() < 1e-12);
    assert_eq!(AreaInteraction::new(12.0, 0.0, 0.05, Window::unit()).unwrap().gamma(), 1.0);
    assert!(AreaInteraction::new(0.0, 0.0, 0.05, Window::unit()).is_err());
    assert!(AreaInteraction::new(1.0, 0.0, 0.0, Window::unit()).is_err());
}

fn bdmh_draws(params: &AreaInteraction, draws: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut chain = BirthDeathChain::new(*params, seed);
    for _ in 0..200 {
        chain.sweep();
    }
    (0..draws)
        .map(|_| {
            chain.sweep();
            chain.state().to_vec()
        })
        .collect()
}

#[test]
fn bdmh_poisson_count_mean() {
    let params = AreaInteraction::new(12.0, 0.0, 0.05, Window::unit()).unwrap();
    let draws = bdmh_draws(&params, 10_000, 31);
    let counts: Vec<f64> = draws.iter().map(|x| x.len() as f64).collect();
    let (mean, se) = aoristic::stats::batch_means(&counts, 50);
    assert!((mean - 12.0).abs() < 3.0 * se, "mean={mean} se={se}");
}

#[test]
fn bdmh_clustering_reduces_coverage() {
    let w = Window::unit();
    let coverage = |eta: f64, seed: u64| {
        let params = AreaInteraction::new(12.0, eta, 0.05, w).unwrap();
        let cov: Vec<f64> = bdmh_draws(&params, 10_000, seed)
            .iter()
            .map(|x| covered_length(x, 0.05, w))
            .collect();
        mean_se(&cov).0
    };
    assert!(coverage(1.2, 32) < coverage(0.0, 33));
}

#[test]
fn bdmh_inhibition_spreads_points() {
    // n · mean NN distance removes the dependence on the intensity, which
    // itself changes with η at fixed β.
    let w = Window::unit();
    let scaled_nn = |eta: f64, seed: u64| {
        let params = AreaInteraction::new(12.0, eta, 0.05, w).unwrap();
        let scaled: Vec<f64> = bdmh_draws(&params, 10_000, seed)
            .iter()
            .filter_map(|x| mean_nearest_neighbour(x).map(|d| d * x.len() as f64))
            .collect();
        mean_se(&scaled)
    };
    let (rep, rep_se) = scaled_nn(-1.2, 34);
    let (pois, pois_se) = scaled_nn(0.0, 35);
    assert!(rep - pois > 3.0 * (rep_se * rep_se + pois_se * pois_se).sqrt(), "{rep} vs {pois}");
}

#[test]
fn bdmh_rejects_zero_sweeps_and_is_deterministic() {
    let params = AreaInteraction::new(12.0, 1.2, 0.05, Window::unit()).unwrap();
    assert!(sample_prior_bdmh(&params, 0, 1).is_err());
    assert_eq!(
        sample_prior_bdmh(&params, 50, 9).unwrap(),
        sample_prior_bdmh(&params, 50, 9).unwrap()
    );
}

#[test]
fn cftp_poisson_counts() {
    let params = AreaInteraction::new(12.0, 0.0, 0.05, Window::unit()).unwrap();
    let max = 30usize;
    let mut observed = vec![0u64; max + 1];
    for seed in 0..10_000u64 {
        let n = sample_prior_cftp(&params, seed).unwrap().len();
        observed[n.min(max)] += 1;
    }
    let pois = Poisson::new(12.0).unwrap();
    let mut probs: Vec<f64> = (0..max).map(|n| pois.pmf(n as u64)).collect();
    probs.push(1.0 - probs.iter().sum::<f64>());
    assert!(!chi_square_gof(&observed, &probs).rejected_at(0.01));
}

#[test]
fn cftp_matches_bdmh_for_repulsive_prior() {
    let w = Window::unit();
    let params = AreaInteraction::new(12.0, -1.2, 0.05, w).unwrap();
    let cftp: Vec<f64> = (0..4_000u64)
        .map(|s| sample_prior_cftp(&params, s).unwrap().len() as f64)
        .collect();
    let bd: Vec<f64> = bdmh_draws(&params, 40_000, 77).iter().map(|x| x.len() as f64).collect();
    let (m1, s1) = mean_se(&cftp);
    let (m2, s2) = aoristic::stats::batch_means(&bd, 50);
    assert!((m1 - m2).abs() < 3.0 * (s1 * s1 + s2 * s2).sqrt(), "{m1} vs {m2}");
}

#[test]
fn cftp_deterministic_and_inside_window() {
    let w = Window::new(2.0, 5.0).unwrap();
    let params = AreaInteraction::new(4.0, 1.2, 0.1, w).unwrap();
    for seed in 0..50 {
        let a = sample_prior_cftp(&params, seed).unwrap();
        assert_eq!(a, sample_prior_cftp(&params, seed).unwrap());
        assert!(a.points().iter().all(|&x| w.contains(x)));
    }
}
