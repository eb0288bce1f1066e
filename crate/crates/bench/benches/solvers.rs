use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use persuade_core::numerics::{lambert_w0, lambert_wm1};
use persuade_core::policy::{continuation_values_ode, interim_deadline_by_root, solve_interim_deadline};
use persuade_core::{cutoffs, optimal_policy, verify_obedience, ProjectParams};

fn at(kappa: f64) -> ProjectParams {
    ProjectParams::from_kappa(1.0, kappa, 1.0, 2.0).unwrap()
}

fn lambert(c: &mut Criterion) {
    let mut g = c.benchmark_group("lambert");
    g.bench_function("w0", |b| b.iter(|| lambert_w0(black_box(-0.2))));
    g.bench_function("wm1", |b| b.iter(|| lambert_wm1(black_box(-0.2))));
    g.bench_function("wm1_near_branch_point", |b| b.iter(|| lambert_wm1(black_box(-0.3678))));
    g.finish();
}

fn solvers(c: &mut Criterion) {
    let p = at(0.44);
    let mut g = c.benchmark_group("solvers");
    g.bench_function("cutoffs", |b| b.iter(|| cutoffs(black_box(&p))));
    g.bench_function("interim_deadline_lambert", |b| b.iter(|| solve_interim_deadline(black_box(&p))));
    g.bench_function("interim_deadline_root", |b| b.iter(|| interim_deadline_by_root(black_box(&p))));
    for kappa in [0.2, 0.28, 0.35, 0.44] {
        g.bench_with_input(BenchmarkId::new("optimal_policy", kappa), &at(kappa), |b, p| {
            b.iter(|| optimal_policy(black_box(p)))
        });
    }
    g.finish();
}

fn obedience(c: &mut Criterion) {
    let mut g = c.benchmark_group("obedience");
    for kappa in [0.35, 0.44] {
        let p = at(kappa);
        let pol = optimal_policy(&p).unwrap().unwrap();
        g.bench_with_input(BenchmarkId::new("quadrature_grid_1000", kappa), &pol, |b, pol| {
            b.iter(|| verify_obedience(&p, black_box(pol), 1000))
        });
        let ts: Vec<f64> = (0..1000).map(|i| 2.0 * i as f64 / 999.0).collect();
        g.bench_with_input(BenchmarkId::new("ode_grid_1000", kappa), &pol, |b, pol| {
            b.iter(|| continuation_values_ode(&p, black_box(pol), &ts))
        });
    }
    g.finish();
}

criterion_group!(benches, lambert, solvers, obedience);
criterion_main!(benches);
