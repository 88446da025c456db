//! Expected-improvement Bayesian optimization over the unit cube.
//!
//! Each iteration conditions a [`GpPosterior`] on all evaluations so far,
//! maximizes expected improvement over the cube and evaluates the objective
//! at the maximizer, until the evaluation budget is spent.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gp::{squared_distance, GpConfig, GpPosterior};
use crate::identification::ParameterBox;
use crate::optim::{start_point, OptimizationResult, Recorder};
use crate::qmc::QuasiRandom;

/// Variance below this (in magnitude) is treated as zero rather than an error.
pub const VARIANCE_TOLERANCE: f64 = 1e-12;

/// Minimum distance between a proposal and every observed point.
pub const MIN_SEPARATION: f64 = 1e-9;

pub fn normal_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * PI).sqrt()
}

pub fn normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z * FRAC_1_SQRT_2)
}

/// `E[max(0, best - xi - Y)]` for `Y ~ N(mean, variance)`.
pub fn expected_improvement(mean: f64, variance: f64, best: f64, xi: f64) -> Result<f64> {
    if variance < -VARIANCE_TOLERANCE || variance.is_nan() {
        return Err(Error::NegativeVariance(variance));
    }
    let gap = best - mean - xi;
    let sigma = variance.max(0.0).sqrt();
    if sigma == 0.0 {
        return Ok(gap.max(0.0));
    }
    let z = gap / sigma;
    Ok((gap * normal_cdf(z) + sigma * normal_pdf(z)).max(0.0))
}

/// `ln(z Phi(z) + phi(z))`, accurate far into the lower tail.
fn log_h(z: f64) -> f64 {
    if z > -8.0 {
        (z * normal_cdf(z) + normal_pdf(z)).ln()
    } else {
        // h(z) = phi(z) / (t K + 1), t = -z, K = t + 2/(t + 3/(t + 4/(t + ...)))
        let t = -z;
        let mut k = t;
        for n in (2..=60).rev() {
            k = t + n as f64 / k;
        }
        -0.5 * z * z - 0.5 * (2.0 * PI).ln() - (t * k + 1.0).ln()
    }
}

/// Logarithm of [`expected_improvement`]; same maximizer, but stays finite
/// where the improvement underflows.
pub fn log_expected_improvement(mean: f64, variance: f64, best: f64, xi: f64) -> f64 {
    let gap = best - mean - xi;
    let sigma = variance.max(0.0).sqrt();
    if sigma == 0.0 {
        return if gap > 0.0 { gap.ln() } else { f64::NEG_INFINITY };
    }
    sigma.ln() + log_h(gap / sigma)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AcquisitionConfig {
    /// Quasi-random candidates scored per iteration.
    pub candidates: usize,
    /// Best candidates handed to local refinement.
    pub refine_top: usize,
    pub refine_steps: usize,
    pub step_start: f64,
    pub step_end: f64,
    /// Improvement threshold.
    pub xi: f64,
}

impl Default for AcquisitionConfig {
    fn default() -> Self {
        Self {
            candidates: 2048,
            refine_top: 5,
            refine_steps: 20,
            step_start: 0.05,
            step_end: 0.001,
            xi: 0.0,
        }
    }
}

impl AcquisitionConfig {
    pub fn validate(&self) -> Result<()> {
        if self.candidates == 0 {
            return Err(Error::InvalidConfig("candidate count must be at least 1".into()));
        }
        if !(self.xi >= 0.0) {
            return Err(Error::InvalidConfig("xi must be non-negative".into()));
        }
        if !(self.step_start > 0.0 && self.step_end > 0.0) {
            return Err(Error::InvalidConfig("refinement steps must be positive".into()));
        }
        Ok(())
    }

    fn step_size(&self, s: usize) -> f64 {
        if self.refine_steps <= 1 {
            return self.step_start;
        }
        let t = s as f64 / (self.refine_steps - 1) as f64;
        self.step_start * (self.step_end / self.step_start).powf(t)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BoRunConfig {
    pub initial_samples: usize,
    pub budget: usize,
    pub seed: u64,
    pub acquisition: AcquisitionConfig,
    pub jitter: f64,
    pub standardize: bool,
}

impl Default for BoRunConfig {
    fn default() -> Self {
        Self {
            initial_samples: 10,
            budget: 50,
            seed: 0,
            acquisition: AcquisitionConfig::default(),
            jitter: 1e-8,
            standardize: true,
        }
    }
}

impl BoRunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.initial_samples < 1 {
            return Err(Error::InvalidConfig("need at least one initial sample".into()));
        }
        if self.budget < self.initial_samples {
            return Err(Error::InvalidConfig(format!(
                "budget {} below initial sample count {}",
                self.budget, self.initial_samples
            )));
        }
        self.acquisition.validate()
    }

    fn gp_config(&self) -> GpConfig {
        GpConfig {
            jitter: self.jitter,
            standardize: self.standardize,
        }
    }
}

struct Scorer<'a> {
    gp: &'a GpPosterior,
    best: f64,
    xi: f64,
}

impl Scorer<'_> {
    fn score(&self, x: &[f64]) -> f64 {
        let (m, v) = self.gp.posterior(x);
        log_expected_improvement(m, v, self.best, self.xi)
    }
}

/// Coordinate search on the acquisition with geometrically shrinking steps.
fn refine(scorer: &Scorer, start: &[f64], start_score: f64, config: &AcquisitionConfig) -> (Vec<f64>, f64) {
    let mut x = start.to_vec();
    let mut fx = start_score;
    for s in 0..config.refine_steps {
        let h = config.step_size(s);
        for d in 0..x.len() {
            for dir in [1.0, -1.0] {
                let mut y = x.clone();
                y[d] = (y[d] + dir * h).clamp(0.0, 1.0);
                if y[d] == x[d] {
                    continue;
                }
                let fy = scorer.score(&y);
                if fy > fx {
                    x = y;
                    fx = fy;
                    break;
                }
            }
        }
    }
    (x, fx)
}

/// Next point to evaluate: the maximizer of expected improvement over the
/// unit cube, found by quasi-random candidate scoring followed by local
/// refinement of the best few.
pub fn maximize_acquisition<R: Rng + ?Sized>(
    gp: &GpPosterior,
    dim: usize,
    config: &AcquisitionConfig,
    rng: &mut R,
) -> Vec<f64> {
    let best = gp.values().iter().copied().fold(f64::INFINITY, f64::min);
    let scorer = Scorer {
        gp,
        best,
        xi: config.xi,
    };
    let shift: Vec<f64> = (0..dim).map(|_| rng.random()).collect();
    let candidates = QuasiRandom::new(shift).take_points(config.candidates);
    let scores: Vec<f64> = candidates.par_iter().map(|c| scorer.score(c)).collect();

    let mut order: Vec<usize> = (0..candidates.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));

    let refined: Vec<(Vec<f64>, f64)> = order
        .iter()
        .take(config.refine_top)
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&&i| refine(&scorer, &candidates[i], scores[i], config))
        .collect();

    let mut best_point = candidates[order[0]].clone();
    let mut best_score = scores[order[0]];
    for (x, s) in refined {
        if s > best_score {
            best_point = x;
            best_score = s;
        }
    }
    separate(best_point, gp.points(), rng)
}

/// Nudges `x` away from observed points it coincides with.
fn separate<R: Rng + ?Sized>(mut x: Vec<f64>, observed: &[Vec<f64>], rng: &mut R) -> Vec<f64> {
    let too_close =
        |x: &[f64]| observed.iter().any(|p| squared_distance(p, x).sqrt() < MIN_SEPARATION);
    let origin = x.clone();
    while too_close(&x) {
        x = origin
            .iter()
            .map(|v| (v + rng.random_range(-1e-6..1e-6)).clamp(0.0, 1.0))
            .collect();
    }
    x
}

/// Runs expected-improvement Bayesian optimization of `objective` (physical
/// coordinates) over `bounds` with an exact evaluation budget.
pub fn run_bo<F>(objective: F, bounds: &ParameterBox, config: &BoRunConfig) -> Result<OptimizationResult>
where
    F: FnMut(&[f64]) -> Result<f64>,
{
    config.validate()?;
    let dim = bounds.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut recorder = Recorder::new(objective, bounds, config.budget);

    let mut design = QuasiRandom::new(start_point(&mut rng, dim));
    for x in design.by_ref().take(config.initial_samples) {
        recorder.eval(&x)?;
    }

    while !recorder.exhausted() {
        let points: Vec<Vec<f64>> = recorder.trace().iter().map(|e| e.unit.clone()).collect();
        let values: Vec<f64> = recorder.trace().iter().map(|e| e.loss).collect();
        let next = match GpPosterior::fit(&points, &values, config.gp_config()) {
            Ok(gp) => maximize_acquisition(&gp, dim, &config.acquisition, &mut rng),
            Err(err @ (Error::SingularKernel { .. } | Error::DuplicatePoint(..))) => {
                log::warn!("GP fit failed ({err}); sampling uniformly this iteration");
                start_point(&mut rng, dim)
            }
            Err(err) => return Err(err),
        };
        recorder.eval(&next)?;
    }
    recorder.finish()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ei_without_uncertainty() {
        assert_eq!(expected_improvement(1.0, 0.0, 1.0, 0.0).unwrap(), 0.0);
        assert_eq!(expected_improvement(2.0, 0.0, 1.0, 0.0).unwrap(), 0.0);
        assert!((expected_improvement(0.7, 0.0, 1.0, 0.0).unwrap() - 0.3).abs() < 1e-15);
        assert!((expected_improvement(0.7, 0.0, 1.0, 0.1).unwrap() - 0.2).abs() < 1e-15);
    }

    #[test]
    fn ei_at_incumbent_is_pdf_at_zero() {
        let ei = expected_improvement(0.0, 1.0, 0.0, 0.0).unwrap();
        assert!((ei - 0.398_942_280_401_432_7).abs() < 1e-15);
    }

    #[test]
    fn negative_variance_rejected_beyond_tolerance() {
        assert!(expected_improvement(0.0, -1e-13, 0.0, 0.0).is_ok());
        assert!(matches!(
            expected_improvement(0.0, -1e-6, 0.0, 0.0),
            Err(Error::NegativeVariance(_))
        ));
    }

    #[test]
    fn log_ei_matches_ei_where_representable() {
        for &(m, v, b) in &[(0.0, 1.0, 0.0), (1.0, 0.25, 0.0), (-1.0, 4.0, 0.5), (7.5, 1.0, 0.0)] {
            let ei = expected_improvement(m, v, b, 0.0).unwrap();
            let lei = log_expected_improvement(m, v, b, 0.0);
            assert!((lei - ei.ln()).abs() < 1e-6, "{m} {v} {b}: {lei} vs {}", ei.ln());
        }
        // Tail values from 50-digit arithmetic.
        assert!((log_h(-9.0) + 45.848_941_292_669_03).abs() < 1e-10);
        assert!((log_h(-12.0) + 77.909_100_545_007_35).abs() < 1e-10);
        // Far tail: finite and ordered.
        let a = log_expected_improvement(40.0, 1.0, 0.0, 0.0);
        let b = log_expected_improvement(41.0, 1.0, 0.0, 0.0);
        assert!(a.is_finite() && b.is_finite() && a > b);
    }

    #[test]
    fn log_h_is_continuous_at_switch() {
        let below = log_h(-8.0 - 1e-9);
        let above = log_h(-8.0 + 1e-9);
        assert!((below - above).abs() < 1e-7);
    }

    #[test]
    fn budget_equal_to_initial_samples_is_random_search() {
        let b = ParameterBox::unit_cube(2);
        let cfg = BoRunConfig {
            initial_samples: 5,
            budget: 5,
            seed: 4,
            ..Default::default()
        };
        let r = run_bo(|x: &[f64]| Ok(x[0] + x[1]), &b, &cfg).unwrap();
        assert_eq!(r.evaluations, 5);
        let min = r.trace.iter().map(|e| e.loss).fold(f64::INFINITY, f64::min);
        assert_eq!(r.best_loss, min);
    }

    #[test]
    fn rejects_invalid_config() {
        let b = ParameterBox::unit_cube(2);
        let cfg = BoRunConfig {
            initial_samples: 0,
            ..Default::default()
        };
        assert!(run_bo(|_: &[f64]| Ok(0.0), &b, &cfg).is_err());
    }

    #[test]
    fn objective_errors_propagate() {
        let b = ParameterBox::unit_cube(2);
        let err = run_bo(
            |_: &[f64]| Err(Error::DimensionMismatch { expected: 3, got: 2 }),
            &b,
            &BoRunConfig::default(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { .. }));
    }
}
