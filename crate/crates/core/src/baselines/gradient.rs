use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::identification::ParameterBox;
use crate::optim::{start_point, OptimizationResult, Recorder};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GdConfig {
    /// Step length in unit-cube coordinates.
    pub step: f64,
    /// Forward-difference increment in unit-cube coordinates.
    pub epsilon: f64,
    pub budget: usize,
    pub seed: u64,
}

impl Default for GdConfig {
    fn default() -> Self {
        Self {
            step: 0.05,
            epsilon: 1e-3,
            budget: 50,
            seed: 0,
        }
    }
}

/// Projected gradient descent with normalized steps of fixed length and a
/// forward-difference gradient (`n + 1` evaluations per iteration).
///
/// Probes that would leave the cube are taken backwards instead. A partial
/// final iteration is allowed so the budget is used exactly.
pub fn gradient_descent<F>(
    objective: F,
    bounds: &ParameterBox,
    config: &GdConfig,
) -> Result<OptimizationResult>
where
    F: FnMut(&[f64]) -> Result<f64>,
{
    if !(config.step > 0.0 && config.epsilon > 0.0) {
        return Err(Error::InvalidConfig("step and epsilon must be positive".into()));
    }
    if config.budget == 0 {
        return Err(Error::InvalidConfig("budget must be positive".into()));
    }
    let dim = bounds.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut x = start_point(&mut rng, dim);
    let mut recorder = Recorder::new(objective, bounds, config.budget);

    'outer: while !recorder.exhausted() {
        let f0 = recorder.eval(&x)?;
        let mut grad = vec![0.0; dim];
        for d in 0..dim {
            if recorder.exhausted() {
                break 'outer;
            }
            let h = if x[d] + config.epsilon <= 1.0 {
                config.epsilon
            } else {
                -config.epsilon
            };
            let mut probe = x.clone();
            probe[d] += h;
            grad[d] = (recorder.eval(&probe)? - f0) / h;
        }
        let norm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
        if norm > 0.0 && norm.is_finite() {
            for (xi, gi) in x.iter_mut().zip(&grad) {
                *xi = (*xi - config.step * gi / norm).clamp(0.0, 1.0);
            }
        }
    }
    recorder.finish()
}
