use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use twophoton_bench::{coefficients, data};
use twophoton_core::fem::assemble_stiffness;
use twophoton_core::forward::solve_semilinear;
use twophoton_core::recon_direct::recover_pair;
use twophoton_core::recon_lsq::LsqProblem;
use twophoton_core::{BoundaryField, Mesh, NewtonConfig, NodalField};

fn assembly(c: &mut Criterion) {
    let mut group = c.benchmark_group("assemble_stiffness");
    for n in [32, 64] {
        let mesh = Mesh::square(n).unwrap();
        let gamma = coefficients(&mesh).diffusion;
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| assemble_stiffness(black_box(&mesh), black_box(&gamma)).unwrap())
        });
    }
    group.finish();
}

fn forward(c: &mut Criterion) {
    let mut group = c.benchmark_group("newton_forward");
    for n in [16, 32, 64] {
        let mesh = Mesh::square(n).unwrap();
        let coeffs = coefficients(&mesh);
        let g = BoundaryField::constant(&mesh, 2.0);
        let cfg = NewtonConfig::default();
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| solve_semilinear(&mesh, black_box(&coeffs), &g, &cfg).unwrap())
        });
    }
    group.finish();
}

fn direct(c: &mut Criterion) {
    let mesh = Mesh::square(32).unwrap();
    let coeffs = coefficients(&mesh);
    let set = data(&mesh, &coeffs);
    c.bench_function("recover_pair/32", |b| {
        b.iter(|| recover_pair(&mesh, &coeffs.gruneisen, &coeffs.diffusion, black_box(&set)).unwrap())
    });
}

fn lsq_gradient(c: &mut Criterion) {
    let mesh = Mesh::square(16).unwrap();
    let coeffs = coefficients(&mesh);
    let set = data(&mesh, &coeffs);
    let problem =
        LsqProblem::new(&mesh, &coeffs.gruneisen, &coeffs.diffusion, &set, 1e-8, NewtonConfig::default()).unwrap();
    let (sigma, mu) = (NodalField::constant(&mesh, 0.12), NodalField::constant(&mesh, 0.025));
    c.bench_function("lsq_gradient/16", |b| b.iter(|| problem.gradient(black_box(&sigma), black_box(&mu)).unwrap()));
}

criterion_group!(benches, assembly, forward, direct, lsq_gradient);
criterion_main!(benches);
