use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use threebody4d::dynamics::{integrate, IntegratorConfig, ReducedSystem};
use threebody4d::equilibria::{general_equilibrium, isosceles_scan, log_grid};
use threebody4d::reduction::{lift_to_full, symplecticity_defect};
use threebody4d::ThreeBody;
use threebody4d_bench::{chart_point, masses, near_equilibrium, reduced_point};

fn reduction(c: &mut Criterion) {
    let z = chart_point();
    c.bench_function("lift_to_full", |b| b.iter(|| lift_to_full(black_box(&z)).unwrap()));
    c.bench_function("symplecticity_defect", |b| b.iter(|| symplecticity_defect(black_box(&z)).unwrap()));
    let body = ThreeBody::newtonian(masses());
    let w = reduced_point();
    c.bench_function("hamiltonian_reduced", |b| b.iter(|| body.hamiltonian_reduced(black_box(&w)).unwrap()));
    c.bench_function("gradient_reduced", |b| b.iter(|| body.gradient_reduced(black_box(&w)).unwrap()));
}

fn equilibria(c: &mut Criterion) {
    let m = masses();
    c.bench_function("general_equilibrium_u1e-2", |b| b.iter(|| general_equilibrium(&m, black_box(1e-2)).unwrap()));
    let ts = log_grid(1e-3, 0.99, 100).unwrap();
    c.bench_function("isosceles_scan_100", |b| b.iter(|| isosceles_scan(1.0, black_box(&ts)).unwrap()));
}

fn dynamics(c: &mut Criterion) {
    let (m, start) = near_equilibrium();
    let sys = ReducedSystem { body: ThreeBody::newtonian(m), mu1: start.mu1, mu2: start.mu2 };
    let y0 = start.to_array();
    let adaptive = IntegratorConfig { max_steps: 1000, ..IntegratorConfig::adaptive(1e-10) };
    c.bench_function("dormand_prince_1000_steps", |b| {
        b.iter(|| integrate(&sys, black_box(&y0), 1e6, &adaptive).unwrap())
    });
    let midpoint = IntegratorConfig { max_steps: 1000, ..IntegratorConfig::midpoint(1e-3) };
    c.bench_function("implicit_midpoint_1000_steps", |b| {
        b.iter(|| integrate(&sys, black_box(&y0), 1e6, &midpoint).unwrap())
    });
}

criterion_group!(benches, reduction, equilibria, dynamics);
criterion_main!(benches);
