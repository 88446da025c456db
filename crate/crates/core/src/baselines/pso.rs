use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::identification::ParameterBox;
use crate::optim::{start_point, OptimizationResult, Recorder};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PsoConfig {
    pub swarm_size: usize,
    pub inertia: f64,
    pub cognitive: f64,
    pub social: f64,
    /// Velocity limit per coordinate, in box widths.
    pub max_velocity: f64,
    pub budget: usize,
    pub seed: u64,
}

impl Default for PsoConfig {
    fn default() -> Self {
        Self {
            swarm_size: 10,
            inertia: 0.729,
            cognitive: 1.494_45,
            social: 1.494_45,
            max_velocity: 0.5,
            budget: 50,
            seed: 0,
        }
    }
}

impl PsoConfig {
    pub fn validate(&self) -> Result<()> {
        if self.swarm_size < 2 {
            return Err(Error::InvalidConfig("swarm needs at least two particles".into()));
        }
        if self.budget < self.swarm_size {
            return Err(Error::InvalidConfig(format!(
                "budget {} below swarm size {}",
                self.budget, self.swarm_size
            )));
        }
        if !(self.max_velocity > 0.0) {
            return Err(Error::InvalidConfig("max_velocity must be positive".into()));
        }
        Ok(())
    }
}

/// Global-best particle swarm optimization with synchronous updates.
///
/// Particle 0 starts at the shared seeded start point, the rest uniformly.
/// The final generation is cut short when the budget runs out.
pub fn pso<F>(objective: F, bounds: &ParameterBox, config: &PsoConfig) -> Result<OptimizationResult>
where
    F: FnMut(&[f64]) -> Result<f64>,
{
    config.validate()?;
    let dim = bounds.dim();
    let vmax = config.max_velocity;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut recorder = Recorder::new(objective, bounds, config.budget);

    let mut positions: Vec<Vec<f64>> = (0..config.swarm_size)
        .map(|_| start_point(&mut rng, dim))
        .collect();
    let mut velocities: Vec<Vec<f64>> = (0..config.swarm_size)
        .map(|_| (0..dim).map(|_| rng.random_range(-0.2 * vmax..0.2 * vmax)).collect())
        .collect();

    let mut pbest = positions.clone();
    let mut pbest_loss = vec![f64::INFINITY; config.swarm_size];
    for (i, x) in positions.iter().enumerate() {
        pbest_loss[i] = recorder.eval(x)?;
    }
    let mut gbest = recorder.best_unit().expect("swarm evaluated").to_vec();

    'generations: loop {
        for i in 0..config.swarm_size {
            if recorder.exhausted() {
                break 'generations;
            }
            for d in 0..dim {
                let r1: f64 = rng.random();
                let r2: f64 = rng.random();
                let v = config.inertia * velocities[i][d]
                    + config.cognitive * r1 * (pbest[i][d] - positions[i][d])
                    + config.social * r2 * (gbest[d] - positions[i][d]);
                velocities[i][d] = v.clamp(-vmax, vmax);
                positions[i][d] = (positions[i][d] + velocities[i][d]).clamp(0.0, 1.0);
            }
            let f = recorder.eval(&positions[i])?;
            if f < pbest_loss[i] {
                pbest_loss[i] = f;
                pbest[i] = positions[i].clone();
            }
        }
        gbest = recorder.best_unit().expect("swarm evaluated").to_vec();
    }
    recorder.finish()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sphere(x: &[f64]) -> Result<f64> {
        Ok((x[0] - 0.3).powi(2) + (x[1] - 0.6).powi(2) + (x[2] - 0.2).powi(2))
    }

    #[test]
    fn stays_in_box_and_respects_budget() {
        let b = ParameterBox::unit_cube(3);
        for seed in 0..5 {
            let r = pso(
                sphere,
                &b,
                &PsoConfig {
                    budget: 47,
                    seed,
                    ..Default::default()
                },
            )
            .unwrap();
            assert_eq!(r.evaluations, 47);
            assert!(r
                .trace
                .iter()
                .all(|e| e.unit.iter().all(|&u| (0.0..=1.0).contains(&u))));
            let curve = r.best_so_far();
            assert!(curve.windows(2).all(|w| w[1] <= w[0]));
        }
    }

    #[test]
    fn deterministic_under_seed() {
        let b = ParameterBox::unit_cube(3);
        let cfg = PsoConfig {
            seed: 3,
            ..Default::default()
        };
        let a = pso(sphere, &b, &cfg).unwrap();
        let c = pso(sphere, &b, &cfg).unwrap();
        assert_eq!(a.trace, c.trace);
    }

    #[test]
    fn invalid_configs() {
        let b = ParameterBox::unit_cube(3);
        let small = PsoConfig {
            swarm_size: 1,
            ..Default::default()
        };
        assert!(pso(sphere, &b, &small).is_err());
        let tight = PsoConfig {
            budget: 5,
            ..Default::default()
        };
        assert!(pso(sphere, &b, &tight).is_err());
    }
}
