//! Reference optimizers sharing the Bayesian optimizer's budget accounting:
//! every objective call, including finite-difference probes, counts.

mod gradient;
mod pso;

pub use gradient::{gradient_descent, GdConfig};
pub use pso::{pso, PsoConfig};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::identification::ParameterBox;
use crate::optim::{start_point, OptimizationResult, Recorder};

/// Uniform random search; the first point is the shared seeded start.
pub fn random_search<F>(
    objective: F,
    bounds: &ParameterBox,
    budget: usize,
    seed: u64,
) -> Result<OptimizationResult>
where
    F: FnMut(&[f64]) -> Result<f64>,
{
    if budget == 0 {
        return Err(Error::InvalidConfig("budget must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut recorder = Recorder::new(objective, bounds, budget);
    while !recorder.exhausted() {
        let x = start_point(&mut rng, bounds.dim());
        recorder.eval(&x)?;
    }
    recorder.finish()
}
