mod common;

use common::mc_expected_improvement;
use ecmid::bayes_opt::{expected_improvement, normal_pdf};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn incumbent_mean_gives_sigma_times_pdf_at_zero() {
    for sigma in [0.1, 1.0, 3.0] {
        let ei = expected_improvement(0.5, sigma * sigma, 0.5, 0.0).unwrap();
        assert!((ei - sigma * normal_pdf(0.0)).abs() < 1e-14);
    }
}

#[test]
fn closed_form_agrees_with_monte_carlo() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..20 {
        let mean = rng.random_range(-2.0..2.0);
        let sigma: f64 = rng.random_range(0.05..2.0);
        // Gap of at most 3 sigma, so the estimate is not all zeros.
        let best = mean + sigma * rng.random_range(-3.0..3.0);
        let ei = expected_improvement(mean, sigma * sigma, best, 0.0).unwrap();
        let (mc, se) = mc_expected_improvement(mean, sigma, best, 200_000, &mut rng);
        assert!((ei - mc).abs() <= 4.0 * se && se > 0.0, "{ei} vs {mc} +- {se}");
    }
}

#[test]
fn large_sample_example() {
    // mean 0, sigma 1, best 0.5
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let ei = expected_improvement(0.0, 1.0, 0.5, 0.0).unwrap();
    let (mc, se) = mc_expected_improvement(0.0, 1.0, 0.5, 10_000_000, &mut rng);
    assert!((ei - mc).abs() <= 4.0 * se);
}

#[test]
fn monotone_in_mean_and_variance() {
    let a = expected_improvement(0.0, 1.0, 0.0, 0.0).unwrap();
    assert!(expected_improvement(-0.1, 1.0, 0.0, 0.0).unwrap() > a);
    assert!(expected_improvement(0.0, 1.5, 0.0, 0.0).unwrap() > a);
    assert!(expected_improvement(0.0, 1.0, 0.0, 0.1).unwrap() < a);
}
