mod common;

use common::{mann_whitney_less, median, sphere};
use ecmid::baselines::{gradient_descent, pso, random_search, GdConfig, PsoConfig};
use ecmid::bayes_opt::{run_bo, BoRunConfig};
use ecmid::identification::ParameterBox;

const CENTER: [f64; 3] = [0.3, 0.6, 0.2];
const SEEDS: u64 = 20;

fn objective(x: &[f64]) -> ecmid::Result<f64> {
    Ok(sphere(x, &CENTER))
}

fn bo_finals() -> Vec<f64> {
    let b = ParameterBox::unit_cube(3);
    (0..SEEDS)
        .map(|seed| {
            let c = BoRunConfig { budget: 50, seed, ..Default::default() };
            run_bo(objective, &b, &c).unwrap().best_loss
        })
        .collect()
}

fn random_finals() -> Vec<f64> {
    let b = ParameterBox::unit_cube(3);
    (0..SEEDS).map(|seed| random_search(objective, &b, 50, seed).unwrap().best_loss).collect()
}

#[test]
fn bo_reaches_the_sphere_minimum() {
    let m = median(&bo_finals());
    assert!(m <= 1e-2, "median {m}");
}

#[test]
fn bo_beats_random_search() {
    let (bo, rs) = (bo_finals(), random_finals());
    assert!(median(&bo) < median(&rs));
    let p = mann_whitney_less(&bo, &rs);
    assert!(p < 0.05, "p = {p}");
}

#[test]
fn pso_is_reasonable_on_the_sphere() {
    let b = ParameterBox::unit_cube(3);
    let finals: Vec<f64> = (0..SEEDS)
        .map(|seed| pso(objective, &b, &PsoConfig { budget: 50, seed, ..Default::default() }).unwrap().best_loss)
        .collect();
    let m = median(&finals);
    assert!(m <= 5e-2, "median {m}");
    assert!(median(&bo_finals()) <= m);
}

#[test]
fn gradient_descent_descends_on_the_sphere() {
    let b = ParameterBox::unit_cube(3);
    for seed in 0..SEEDS {
        let r = gradient_descent(objective, &b, &GdConfig { budget: 50, seed, ..Default::default() }).unwrap();
        assert_eq!(r.evaluations, 50);
        assert!(r.best_loss < r.trace[0].loss || r.trace[0].loss < 1e-3);
    }
}
