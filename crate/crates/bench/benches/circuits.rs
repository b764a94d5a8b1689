use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use qcirc_bench::feedforward_ladder;
use qcirc_core::random::{random_density, random_unitary};
use qcirc_core::{
    aggregate_measurement, catalog, defer_measurements, embed, enumerate_linear_schedules, greedy_schedule, run,
    DensityOperator, C64,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::hint::black_box;

fn embedding(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let u = random_unitary(&mut rng, 4);
    let mut group = c.benchmark_group("embed");
    for n in [4, 6, 8] {
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            b.iter(|| embed(black_box(&u), &[n - 1, 1], n).unwrap())
        });
    }
    group.finish();
}

fn semantics(c: &mut Criterion) {
    let teleport = catalog::teleportation();
    c.bench_function("aggregate/teleportation", |b| b.iter(|| aggregate_measurement(black_box(&teleport)).unwrap()));

    let mut group = c.benchmark_group("aggregate/ladder");
    for n in [3, 5, 7] {
        let circuit = feedforward_ladder(n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &circuit, |b, circuit| {
            b.iter(|| aggregate_measurement(circuit).unwrap())
        });
    }
    group.finish();

    let x = greedy_schedule(&teleport).unwrap();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let rho = DensityOperator::from_ket(&catalog::teleportation_input([C64::new(h, 0.0), C64::new(0.0, h)])).unwrap();
    let mut seed = 0u64;
    c.bench_function("run/teleportation", |b| {
        b.iter(|| {
            seed += 1;
            run(&teleport, &x, &rho, seed).unwrap()
        })
    });

    let ladder = feedforward_ladder(6);
    let rho = random_density(&mut ChaCha8Rng::seed_from_u64(2), 6);
    let x = greedy_schedule(&ladder).unwrap();
    c.bench_function("run/ladder-6", |b| b.iter(|| run(&ladder, &x, black_box(&rho), 7).unwrap()));
    c.bench_function("schedules/ladder-6", |b| {
        b.iter(|| enumerate_linear_schedules(black_box(&ladder), Some(1000)).unwrap())
    });
}

fn deferral(c: &mut Criterion) {
    let teleport = catalog::teleportation();
    c.bench_function("defer/teleportation", |b| b.iter(|| defer_measurements(black_box(&teleport)).unwrap()));
    let plus_minus = catalog::plus_minus_feedforward();
    c.bench_function("defer/plus-minus", |b| b.iter(|| defer_measurements(black_box(&plus_minus)).unwrap()));
    let mut group = c.benchmark_group("defer/ladder");
    for n in [3, 5, 7] {
        let circuit = feedforward_ladder(n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &circuit, |b, circuit| {
            b.iter(|| defer_measurements(circuit).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, embedding, semantics, deferral);
criterion_main!(benches);
