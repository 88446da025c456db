//! Fixtures shared by the benchmarks.

use ecmid::harness::{generate_profile, ProfileSpec};
use ecmid::{Cell, CurrentProfile};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// The reference cell and the default training profile (rcid-like, 3600 s).
pub fn reference_case() -> (Cell, CurrentProfile) {
    let cell = Cell::reference();
    let profile = generate_profile(&ProfileSpec::rcid("rcid", 3600.0), &cell.params)
        .expect("reference profile is valid");
    (cell, profile)
}

/// `n` seeded points in the unit cube with a smooth response.
pub fn gp_data(n: usize, dim: usize, seed: u64) -> (Vec<Vec<f64>>, Vec<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..dim).map(|_| rng.random::<f64>()).collect())
        .collect();
    let values = points
        .iter()
        .map(|p| p.iter().enumerate().map(|(i, x)| ((i + 1) as f64 * x).sin()).sum())
        .collect();
    (points, values)
}
