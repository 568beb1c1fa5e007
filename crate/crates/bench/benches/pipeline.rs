use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use hiereco::config::presets;
use hiereco::exponents;
use hiereco::solver::{solve_rho, Grid, Operator};
use hiereco::spectral::{discretize_a, spectrum};
use hiereco::stochastic::{estimate_rho_mc, sample_step, McOptions, RandomStream};

fn bench_operator(c: &mut Criterion) {
    let config = presets::linear(3.0);
    let report = exponents::compute(&config).unwrap();
    let grid = Grid::build(201, 1e-4, 2.0).unwrap();
    c.bench_function("assemble_operator_201", |b| {
        b.iter(|| Operator::assemble(black_box(&config), &report, &grid).unwrap())
    });
    let op = Operator::assemble(&config, &report, &grid).unwrap();
    let rho = vec![1.0; grid.len()];
    c.bench_function("operator_sweep_201", |b| {
        b.iter(|| op.apply(black_box(&rho)))
    });
}

fn bench_solve(c: &mut Criterion) {
    let config = presets::sigmoidal(20.0, 3.9);
    let report = exponents::compute(&config).unwrap();
    let grid = Grid::build(201, 1e-4, 2.0).unwrap();
    c.bench_function("solve_rho_201", |b| {
        b.iter(|| solve_rho(black_box(&config), &report, &grid, 1e-8, 2000).unwrap())
    });
}

fn bench_moments(c: &mut Criterion) {
    let config = presets::sigmoidal(20.0, 3.9);
    c.bench_function("moment_quadrature", |b| {
        b.iter(|| config.moment(black_box(0.22741)).unwrap())
    });
    c.bench_function("compute_b_root", |b| {
        b.iter(|| exponents::compute_b(black_box(&config)).unwrap())
    });
}

fn bench_chain(c: &mut Criterion) {
    let config = presets::sigmoidal(20.0, 4.0);
    let report = exponents::compute(&config).unwrap();
    c.bench_function("chain_steps_1e4", |b| {
        b.iter(|| {
            let mut rng = RandomStream::new(1, 0).rng();
            let mut acc = 0.0;
            for _ in 0..10_000 {
                acc += sample_step(&config, &report, black_box(0.2), &mut rng).unwrap();
            }
            acc
        })
    });
    c.bench_function("rho_mc_1000_paths", |b| {
        b.iter(|| {
            estimate_rho_mc(
                &config,
                &report,
                black_box(0.3),
                1000,
                RandomStream::new(2, 0),
                &McOptions::default(),
            )
            .unwrap()
        })
    });
}

fn bench_spectrum(c: &mut Criterion) {
    let config = presets::linear(3.0);
    let report = exponents::compute(&config).unwrap();
    let matrix = discretize_a(&config, &report, 100).unwrap();
    c.bench_function("spectrum_100", |b| {
        b.iter(|| spectrum(black_box(&matrix)).unwrap())
    });
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = bench_operator, bench_solve, bench_moments, bench_chain, bench_spectrum
}
criterion_main!(benches);
