use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use cubic_hodge::algebra::format::parse_jet;
use cubic_hodge::loop_solver::LoopSolver;
use cubic_hodge::ptensor::PTensorTable;
use cubic_hodge::virasoro::{commutator_grid, RationalParams};

fn solve(c: &mut Criterion) {
    let mut group = c.benchmark_group("solve_all");
    group.sample_size(10);
    for g in [2u32, 3, 4] {
        group.bench_function(format!("genus {g}"), |b| b.iter(|| LoopSolver::new(black_box(g)).solve_all().unwrap()));
    }
    group.finish();
}

fn ptable(c: &mut Criterion) {
    let mut group = c.benchmark_group("ptensor_table");
    group.sample_size(10);
    for n in [4usize, 7, 10] {
        group.bench_function(format!("n_max {n}"), |b| b.iter(|| PTensorTable::new(black_box(n))));
    }
    group.finish();
}

fn jet_mul(c: &mut Criterion) {
    let a = parse_jet("(1/17280)*s1^3*z1^2 - (1/34560)*s3*z1^2 + (7/5760)*s1^2*z2 + (1/480)*s1*z1^-1*z3 - (11/5760)*s1*z1^-2*z2^2 + (1/1152)*z1^-2*z4").unwrap();
    let b = parse_jet("z1^-3*z2*z3 + s1*z2^2 + (3/7)*z5 - s3*z1^4").unwrap();
    c.bench_function("jet_mul", |bch| bch.iter(|| black_box(&a) * black_box(&b)));
}

fn commutators(c: &mut Criterion) {
    let p = RationalParams::new(1, 2).unwrap();
    let mut group = c.benchmark_group("commutator_grid");
    group.sample_size(10);
    group.bench_function("(1,2) m <= 2 degree 2", |b| b.iter(|| commutator_grid(&p, 2, 2).unwrap()));
    group.finish();
}

criterion_group!(benches, solve, ptable, jet_mul, commutators);
criterion_main!(benches);
