use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use tfn_bench::{contracting_network, unitary_network};
use tfn_core::oracle::{solve_by_iteration, IterationOptions};
use tfn_core::scenarios::{perturbative_check, perturbative_instance, phase_scan};
use tfn_core::Operator;

fn closed_form(c: &mut Criterion) {
    let mut group = c.benchmark_group("closed_form");
    for dim in [1, 2, 4, 8] {
        let (net, psi) = unitary_network(dim, 11);
        group.bench_with_input(BenchmarkId::from_parameter(dim), &dim, |b, _| {
            b.iter(|| net.solve_closed_form(black_box(&psi)).unwrap())
        });
    }
    group.finish();
}

fn invert(c: &mut Criterion) {
    let a = Operator::random_unitary(8, 5).unwrap();
    c.bench_function("invert_d8", |b| b.iter(|| black_box(&a).invert().unwrap()));
}

fn iteration(c: &mut Criterion) {
    let mut group = c.benchmark_group("iteration");
    group.sample_size(20);
    let opts = IterationOptions::default();
    for radius in [0.8, 0.95] {
        let (net, psi) = contracting_network(8, 3, radius);
        group.bench_with_input(BenchmarkId::new("d8", radius), &radius, |b, _| {
            b.iter(|| solve_by_iteration(&net, black_box(&psi), &opts).unwrap())
        });
    }
    group.finish();
}

fn scan(c: &mut Criterion) {
    let mut group = c.benchmark_group("phase_scan");
    group.sample_size(20);
    group.bench_function("4001_points", |b| {
        b.iter(|| phase_scan(black_box(0.3), 0.0, -std::f64::consts::PI, std::f64::consts::PI, 4001).unwrap())
    });
    group.finish();
}

fn perturbative(c: &mut Criterion) {
    let (g1, g2, m, psi) = perturbative_instance(4, 7).unwrap();
    c.bench_function("perturbative_d4", |b| {
        b.iter(|| perturbative_check(&g1, &g2, &m, black_box(&psi), 1e-5).unwrap())
    });
}

criterion_group!(benches, closed_form, invert, iteration, scan, perturbative);
criterion_main!(benches);
