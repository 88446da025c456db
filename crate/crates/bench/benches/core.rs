use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use ecmid::bayes_opt::{maximize_acquisition, AcquisitionConfig};
use ecmid::gp::{GpConfig, GpPosterior};
use ecmid::model::simulate;
use ecmid_bench::{gp_data, reference_case};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn bench_simulate(c: &mut Criterion) {
    let (cell, profile) = reference_case();
    c.bench_function("simulate/rcid_3600s", |b| {
        b.iter(|| simulate(&cell.params, &cell.ocv_p, &cell.ocv_n, black_box(&profile)).unwrap())
    });
}

fn bench_gp(c: &mut Criterion) {
    let mut group = c.benchmark_group("gp");
    for n in [10, 50, 200] {
        let (points, values) = gp_data(n, 3, 1);
        group.bench_with_input(BenchmarkId::new("fit", n), &n, |b, _| {
            b.iter(|| GpPosterior::fit(black_box(&points), black_box(&values), GpConfig::default()).unwrap())
        });
        let gp = GpPosterior::fit(&points, &values, GpConfig::default()).unwrap();
        group.bench_with_input(BenchmarkId::new("posterior", n), &n, |b, _| {
            b.iter(|| gp.posterior(black_box(&[0.3, 0.6, 0.9])))
        });
    }
    group.finish();
}

fn bench_acquisition(c: &mut Criterion) {
    let mut group = c.benchmark_group("maximize_acquisition");
    for n in [10, 50] {
        let (points, values) = gp_data(n, 3, 2);
        let gp = GpPosterior::fit(&points, &values, GpConfig::default()).unwrap();
        let config = AcquisitionConfig::default();
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            let mut rng = ChaCha8Rng::seed_from_u64(3);
            b.iter(|| maximize_acquisition(&gp, 3, &config, &mut rng))
        });
    }
    group.finish();
}

criterion_group!(benches, bench_simulate, bench_gp, bench_acquisition);
criterion_main!(benches);
