use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use persuade_core::extensions::kappa_tilde_general_mc;
use persuade_core::{estimate, grid_search_oracle, optimal_policy, EvalMode, PolicyFamily, ProjectParams};

fn at(kappa: f64) -> ProjectParams {
    ProjectParams::from_kappa(1.0, kappa, 1.0, 2.0).unwrap()
}

fn monte_carlo(c: &mut Criterion) {
    let mut g = c.benchmark_group("estimate");
    g.sample_size(20);
    for kappa in [0.35, 0.44] {
        let p = at(kappa);
        let pol = optimal_policy(&p).unwrap().unwrap();
        for n in [100_000usize, 1_000_000] {
            g.throughput(Throughput::Elements(n as u64));
            g.bench_with_input(BenchmarkId::new(pol.name(), n), &n, |b, &n| {
                b.iter(|| estimate(&p, black_box(&pol), n, 42))
            });
        }
    }
    g.finish();

    let p = at(0.3).with_preferences(0.1, 0.8, 1.0).unwrap();
    let mut g = c.benchmark_group("general_cutoff_mc");
    g.sample_size(10);
    g.throughput(Throughput::Elements(1_000_000));
    g.bench_function("1e6", |b| b.iter(|| kappa_tilde_general_mc(black_box(&p), 1_000_000, 42)));
    g.finish();
}

fn oracle(c: &mut Criterion) {
    let mut g = c.benchmark_group("oracle");
    g.sample_size(10);
    let p = at(0.44);
    for family in [PolicyFamily::InterimDeadline, PolicyFamily::TwoPointDeadlineMixture] {
        g.bench_with_input(BenchmarkId::new(format!("{family:?}"), 2000), &family, |b, &f| {
            b.iter(|| grid_search_oracle(&p, f, 2000, EvalMode::Analytic))
        });
    }
    g.finish();
}

criterion_group!(benches, monte_carlo, oracle);
criterion_main!(benches);
