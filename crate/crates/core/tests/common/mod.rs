//! Independent reference implementations used as test oracles.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

pub fn se_kernel(a: &[f64], b: &[f64]) -> f64 {
    let d2: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    (-0.5 * d2).exp()
}

/// Gaussian conditioning with an explicit inverse of `K + jitter I`.
pub fn dense_gp_posterior(points: &[Vec<f64>], y: &[f64], jitter: f64, x: &[f64]) -> (f64, f64) {
    let n = points.len();
    let k = DMatrix::from_fn(n, n, |i, j| se_kernel(&points[i], &points[j]) + if i == j { jitter } else { 0.0 });
    let inv = k.try_inverse().expect("invertible");
    let kx = DVector::from_fn(n, |i, _| se_kernel(&points[i], x));
    let yv = DVector::from_column_slice(y);
    let mean = (kx.transpose() * &inv * yv)[(0, 0)];
    let var = se_kernel(x, x) - (kx.transpose() * &inv * &kx)[(0, 0)];
    (mean, var.max(0.0))
}

/// Monte Carlo estimate of `E[max(0, best - X)]`, `X ~ N(mean, sigma^2)`,
/// and its standard error.
pub fn mc_expected_improvement<R: Rng>(mean: f64, sigma: f64, best: f64, samples: usize, rng: &mut R) -> (f64, f64) {
    let mut sum = 0.0;
    let mut sum2 = 0.0;
    for _ in 0..samples {
        let z: f64 = rng.sample(StandardNormal);
        let g = (best - (mean + sigma * z)).max(0.0);
        sum += g;
        sum2 += g * g;
    }
    let n = samples as f64;
    let m = sum / n;
    let var = (sum2 / n - m * m).max(0.0) * n / (n - 1.0);
    (m, (var / n).sqrt())
}

fn normal_sf(z: f64) -> f64 {
    0.5 * libm::erfc(z / std::f64::consts::SQRT_2)
}

/// One-sided Mann-Whitney U test of "values in `a` tend to be smaller than
/// values in `b`"; normal approximation with tie and continuity corrections.
pub fn mann_whitney_less(a: &[f64], b: &[f64]) -> f64 {
    let (n1, n2) = (a.len() as f64, b.len() as f64);
    let mut all: Vec<(f64, bool)> = a.iter().map(|&v| (v, true)).chain(b.iter().map(|&v| (v, false))).collect();
    all.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut ranks = vec![0.0; all.len()];
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < all.len() {
        let mut j = i;
        while j + 1 < all.len() && all[j + 1].0 == all[i].0 {
            j += 1;
        }
        let r = 0.5 * ((i + 1) + (j + 1)) as f64;
        for rank in ranks.iter_mut().take(j + 1).skip(i) {
            *rank = r;
        }
        let t = (j - i + 1) as f64;
        tie_term += t * t * t - t;
        i = j + 1;
    }
    let r1: f64 = all.iter().zip(&ranks).filter(|(v, _)| v.1).map(|(_, r)| r).sum();
    let u1 = r1 - n1 * (n1 + 1.0) / 2.0;
    let n = n1 + n2;
    let mu = n1 * n2 / 2.0;
    let sigma = (n1 * n2 / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)))).sqrt();
    // Small U means `a` ranks low.
    let z = (mu - u1 - 0.5) / sigma;
    normal_sf(z)
}

/// Squared distance to `center`.
pub fn sphere(x: &[f64], center: &[f64]) -> f64 {
    x.iter().zip(center).map(|(a, b)| (a - b) * (a - b)).sum()
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}
