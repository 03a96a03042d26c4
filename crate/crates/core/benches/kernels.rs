use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use formwave::calculus::d_full;
use formwave::field::FieldState;
use formwave::grid::{Grid, GridSpec};
use formwave::nonlinearity::{full_source, star_square, SourceOptions};
use formwave::sample::{random_field, random_jet, rng};
use formwave::Exec;

fn policies() -> Vec<(&'static str, Exec)> {
    let mut p = vec![("sequential", Exec::Sequential)];
    if cfg!(feature = "parallel") {
        p.push(("parallel", Exec::Parallel));
    }
    p
}

fn kernels(c: &mut Criterion) {
    let grid = Grid::new(GridSpec::new(24, 12.0, 1, 1)).unwrap();
    let mut r = rng(1);
    let jet = random_jet(&grid, 3, 2, 6, &mut r);
    let du = d_full(&jet, Exec::Sequential).unwrap().levels.remove(0);
    let state = FieldState {
        u: random_field(&grid, 3, 6, &mut r),
        ut: random_field(&grid, 3, 6, &mut r),
        time: 0.0,
    };

    let mut g = c.benchmark_group("kernels");
    g.sample_size(10);
    for (name, exec) in policies() {
        g.bench_with_input(BenchmarkId::new("exterior_derivative", name), &exec, |b, &e| {
            b.iter(|| d_full(&jet, e).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("star_square", name), &exec, |b, &e| {
            b.iter(|| star_square(&du, e).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("full_source", name), &exec, |b, &e| {
            b.iter(|| full_source(&state, SourceOptions { dealias: true, exec: e }).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, kernels);
criterion_main!(benches);
