//! Zero-mean Gaussian-process regression with a fixed squared-exponential
//! kernel on unit-cube coordinates.
//!
//! Posterior moments follow the conditional multivariate Gaussian:
//! `mean = k^T K^-1 y` and `var = k(x, x) - k^T K^-1 k`, with `K` factored
//! once per fit. Observed values are standardized internally (zero mean,
//! unit variance) and de-standardized on output, so the unit-variance prior
//! matches the data scale.

use std::path::Path;

use crate::error::{Error, Result};
use crate::linalg;

/// Jitter values tried in turn when the kernel matrix fails to factor.
pub const JITTER_LADDER: [f64; 3] = [1e-8, 1e-6, 1e-4];

/// Inputs closer than this are treated as the same point.
pub const DUPLICATE_TOLERANCE: f64 = 1e-10;

/// `k(a, b) = exp(-|a - b|^2 / 2)`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SquaredExponential;

impl SquaredExponential {
    pub fn eval(&self, a: &[f64], b: &[f64]) -> f64 {
        (-0.5 * squared_distance(a, b)).exp()
    }
}

pub(crate) fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GpConfig {
    pub jitter: f64,
    /// Standardize observed values before conditioning.
    pub standardize: bool,
}

impl Default for GpConfig {
    fn default() -> Self {
        Self {
            jitter: 1e-8,
            standardize: true,
        }
    }
}

/// Conditioned GP, immutable after [`GpPosterior::fit`].
#[derive(Debug, Clone)]
pub struct GpPosterior {
    kernel: SquaredExponential,
    points: Vec<Vec<f64>>,
    values: Vec<f64>,
    chol: Vec<f64>,
    weights: Vec<f64>,
    jitter: f64,
    y_mean: f64,
    y_scale: f64,
}

impl GpPosterior {
    pub fn fit(points: &[Vec<f64>], values: &[f64], config: GpConfig) -> Result<Self> {
        let n = points.len();
        if n == 0 {
            return Err(Error::EmptyData);
        }
        if values.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: values.len(),
            });
        }
        let dim = points[0].len();
        if let Some(p) = points.iter().find(|p| p.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: p.len(),
            });
        }
        for i in 0..n {
            for j in 0..i {
                if squared_distance(&points[i], &points[j]).sqrt() <= DUPLICATE_TOLERANCE {
                    return Err(Error::DuplicatePoint(j, i));
                }
            }
        }

        let (y_mean, y_scale) = if config.standardize {
            standardization(values)
        } else {
            (0.0, 1.0)
        };
        let y: Vec<f64> = values.iter().map(|v| (v - y_mean) / y_scale).collect();

        let kernel = SquaredExponential;
        let mut gram = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                let k = kernel.eval(&points[i], &points[j]);
                gram[i * n + j] = k;
                gram[j * n + i] = k;
            }
        }

        let ladder = std::iter::once(config.jitter.max(0.0))
            .chain(JITTER_LADDER.into_iter().filter(|&j| j > config.jitter));
        let mut last = config.jitter;
        for jitter in ladder {
            last = jitter;
            let mut a = gram.clone();
            for i in 0..n {
                a[i * n + i] += jitter;
            }
            if let Some(chol) = linalg::cholesky(&a, n) {
                let mut weights = y.clone();
                linalg::solve_lower(&chol, n, &mut weights);
                linalg::solve_upper_transposed(&chol, n, &mut weights);
                return Ok(Self {
                    kernel,
                    points: points.to_vec(),
                    values: values.to_vec(),
                    chol,
                    weights,
                    jitter,
                    y_mean,
                    y_scale,
                });
            }
        }
        Err(Error::SingularKernel { jitter: last })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Jitter that made the kernel matrix factor.
    pub fn jitter(&self) -> f64 {
        self.jitter
    }

    /// Lower-triangular factor of `K + jitter I`, row-major.
    pub fn factor(&self) -> &[f64] {
        &self.chol
    }

    pub fn standardization(&self) -> (f64, f64) {
        (self.y_mean, self.y_scale)
    }

    /// Posterior mean and variance in the units of the observed values.
    pub fn posterior(&self, x: &[f64]) -> (f64, f64) {
        let n = self.points.len();
        let mut k: Vec<f64> = self.points.iter().map(|p| self.kernel.eval(p, x)).collect();
        let mean_std: f64 = k.iter().zip(&self.weights).map(|(a, b)| a * b).sum();
        linalg::solve_lower(&self.chol, n, &mut k);
        let reduction: f64 = k.iter().map(|v| v * v).sum();
        let var_std = (self.kernel.eval(x, x) - reduction).max(0.0);
        (
            self.y_mean + self.y_scale * mean_std,
            self.y_scale * self.y_scale * var_std,
        )
    }

    /// Prior variance in output units.
    pub fn prior_variance(&self) -> f64 {
        self.y_scale * self.y_scale
    }

    /// Writes observed points, values and the kernel matrix for debugging.
    pub fn dump_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut w = csv::WriterBuilder::new()
            .flexible(true)
            .from_path(path)
            .map_err(|e| Error::csv(path, e))?;
        for (i, (p, v)) in self.points.iter().zip(&self.values).enumerate() {
            let mut row: Vec<String> = vec!["point".into(), i.to_string()];
            row.extend(p.iter().map(|x| x.to_string()));
            row.push(v.to_string());
            w.write_record(&row).map_err(|e| Error::csv(path, e))?;
        }
        for (i, a) in self.points.iter().enumerate() {
            let mut row: Vec<String> = vec!["kernel".into(), i.to_string()];
            row.extend(self.points.iter().map(|b| self.kernel.eval(a, b).to_string()));
            w.write_record(&row).map_err(|e| Error::csv(path, e))?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }
}

/// Mean and population standard deviation; unit scale for constant data.
fn standardization(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    let sd = var.sqrt();
    if sd > 0.0 && sd.is_finite() {
        (mean, sd)
    } else {
        (mean, 1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_points(rng: &mut ChaCha8Rng, n: usize, d: usize) -> Vec<Vec<f64>> {
        (0..n).map(|_| (0..d).map(|_| rng.random()).collect()).collect()
    }

    #[test]
    fn kernel_properties() {
        let k = SquaredExponential;
        let a = [0.1, 0.2, 0.3];
        let b = [0.9, 0.4, 0.0];
        assert_eq!(k.eval(&a, &a), 1.0);
        assert_eq!(k.eval(&a, &b), k.eval(&b, &a));
        assert!(k.eval(&a, &b) > 0.0 && k.eval(&a, &b) < 1.0);
    }

    #[test]
    fn single_point_factor() {
        let gp = GpPosterior::fit(&[vec![0.5, 0.5]], &[3.0], GpConfig::default()).unwrap();
        assert_eq!(gp.factor(), &[(1.0f64 + 1e-8).sqrt()]);
    }

    #[test]
    fn duplicate_points_rejected() {
        let pts = vec![vec![0.2, 0.3], vec![0.5, 0.5], vec![0.2, 0.3]];
        assert!(matches!(
            GpPosterior::fit(&pts, &[1.0, 2.0, 3.0], GpConfig::default()),
            Err(Error::DuplicatePoint(0, 2))
        ));
    }

    #[test]
    fn empty_and_mismatched_input() {
        assert!(matches!(
            GpPosterior::fit(&[], &[], GpConfig::default()),
            Err(Error::EmptyData)
        ));
        assert!(GpPosterior::fit(&[vec![0.1]], &[1.0, 2.0], GpConfig::default()).is_err());
    }

    #[test]
    fn factor_reconstructs_kernel_matrix() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let pts = random_points(&mut rng, 20, 3);
        let vals: Vec<f64> = (0..20).map(|_| rng.random()).collect();
        let gp = GpPosterior::fit(&pts, &vals, GpConfig::default()).unwrap();
        let n = 20;
        let l = gp.factor();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let llt: f64 = (0..n).map(|k| l[i * n + k] * l[j * n + k]).sum();
                let mut kij = SquaredExponential.eval(&pts[i], &pts[j]);
                if i == j {
                    kij += gp.jitter();
                }
                worst = worst.max((llt - kij).abs());
            }
        }
        assert!(worst < 1e-10, "{worst}");
    }

    #[test]
    fn interpolates_observations() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let pts = random_points(&mut rng, 6, 3);
        let vals: Vec<f64> = pts.iter().map(|p| 10.0 + p[0] - 2.0 * p[1] * p[2]).collect();
        let gp = GpPosterior::fit(&pts, &vals, GpConfig::default()).unwrap();
        for (p, v) in pts.iter().zip(&vals) {
            let (m, s2) = gp.posterior(p);
            assert!((m - v).abs() <= 1e-4 * v.abs());
            assert!(s2 <= 1e-6);
        }
    }

    #[test]
    fn reverts_to_prior_far_from_data() {
        let pts = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]];
        let vals = [1.0, 2.0, 4.0];
        let gp = GpPosterior::fit(&pts, &vals, GpConfig::default()).unwrap();
        let (mean, scale) = gp.standardization();
        let (m, s2) = gp.posterior(&[8.0, 8.0]);
        assert!((m - mean).abs() < 1e-6 * scale);
        assert!((s2 - gp.prior_variance()).abs() < 1e-6 * gp.prior_variance());
    }

    #[test]
    fn ladder_escalates_on_near_duplicates() {
        // Points 1e-7 apart are legal but make K numerically singular at zero jitter.
        let pts: Vec<Vec<f64>> = (0..40).map(|i| vec![0.5 + 1e-7 * i as f64]).collect();
        let vals: Vec<f64> = (0..40).map(|i| i as f64).collect();
        let gp = GpPosterior::fit(
            &pts,
            &vals,
            GpConfig {
                jitter: 0.0,
                standardize: true,
            },
        )
        .unwrap();
        assert!(gp.jitter() > 0.0);
    }

    #[test]
    fn variance_bounded_by_prior_and_permutation_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let pts = random_points(&mut rng, 8, 3);
            let vals: Vec<f64> = (0..8).map(|_| rng.random::<f64>() * 30.0).collect();
            let gp = GpPosterior::fit(&pts, &vals, GpConfig::default()).unwrap();
            let mut order: Vec<usize> = (0..8).collect();
            order.reverse();
            order.swap(0, 3);
            let p2: Vec<Vec<f64>> = order.iter().map(|&i| pts[i].clone()).collect();
            let v2: Vec<f64> = order.iter().map(|&i| vals[i]).collect();
            let gp2 = GpPosterior::fit(&p2, &v2, GpConfig::default()).unwrap();
            for _ in 0..10 {
                let q: Vec<f64> = (0..3).map(|_| rng.random()).collect();
                let (m, s2) = gp.posterior(&q);
                let (m2, s22) = gp2.posterior(&q);
                assert!(s2 <= gp.prior_variance() * (1.0 + 1e-12));
                assert!((m - m2).abs() < 1e-10 * (1.0 + m.abs()) * 10.0);
                assert!((s2 - s22).abs() < 1e-10 * gp.prior_variance());
            }
        }
    }
}
