use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use unitary_dirac::checks::{radial_matrix, spin_sum_defects};
use unitary_dirac::fields::greens_poisson;
use unitary_dirac::grid::{Grid3, GridField};
use unitary_dirac::radial::solve_many;
use unitary_dirac::scattering::{sweep_ep, ScatterKinematics, Sigma1Mode};
use unitary_dirac::{Execution, ALPHA, ELECTRON_MASS_EV};

const POLICIES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn poisson(c: &mut Criterion) {
    let g = Grid3::cube(20, 2.0).unwrap();
    let src = GridField::from_fn(g, |[x, y, z]| (-(x * x + y * y + z * z)).exp());
    let mut group = c.benchmark_group("poisson_20cube");
    group.sample_size(10);
    for (name, exec) in POLICIES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &e| {
            b.iter(|| greens_poisson(black_box(&src), e).unwrap())
        });
    }
    group.finish();
}

fn radial(c: &mut Criterion) {
    let problems = radial_matrix();
    let mut group = c.benchmark_group("radial_matrix");
    group.sample_size(10);
    for (name, exec) in POLICIES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &e| {
            b.iter(|| solve_many(black_box(&problems), e))
        });
    }
    group.finish();
}

fn scatter(c: &mut Criterion) {
    let k = ScatterKinematics::new(188e6, 1.0, ELECTRON_MASS_EV, Some(938e6)).unwrap();
    let thetas: Vec<f64> = (1..=20_000).map(|i| i as f64 * std::f64::consts::PI / 20_000.0).collect();
    let mut group = c.benchmark_group("scatter_sweep_20000");
    for (name, exec) in POLICIES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &e| {
            b.iter(|| sweep_ep(&k, black_box(&thetas), ALPHA, Sigma1Mode::Exact, e))
        });
    }
    group.finish();
}

fn spin_sums(c: &mut Criterion) {
    let mut group = c.benchmark_group("spin_sums_1000");
    group.sample_size(20);
    for (name, exec) in POLICIES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &e| {
            b.iter(|| spin_sum_defects(black_box(1000), e))
        });
    }
    group.finish();
}

criterion_group!(benches, poisson, radial, scatter, spin_sums);
criterion_main!(benches);
