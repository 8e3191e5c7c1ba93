use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use flopart::bench::BENCH_PENALTY;
use flopart::{fit, LabelSet};
use flopart_bench::{accumulated_cost, workload};

fn fits(c: &mut Criterion) {
    let mut group = c.benchmark_group("fit");
    group.sample_size(10);
    for n in [1_000, 10_000, 100_000] {
        let s = workload(n, 1);
        let empty = LabelSet::empty(n);
        group.bench_with_input(BenchmarkId::new("flopart", n), &s, |b, s| {
            b.iter(|| fit(black_box(&s.data), &s.labels, BENCH_PENALTY).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("gfpop", n), &s, |b, s| {
            b.iter(|| fit(black_box(&s.data), &empty, BENCH_PENALTY).unwrap())
        });
    }
    group.finish();
}

fn operators(c: &mut Criterion) {
    let f = accumulated_cost(&workload(2_000, 2).data, 5.0);
    let g = f.clone().add_constant(1.0).add_loss(3.0, 1.0);
    let mut group = c.benchmark_group("operators");
    group.bench_function("min_less", |b| b.iter(|| black_box(&f).min_less()));
    group.bench_function("min_more", |b| b.iter(|| black_box(&f).min_more()));
    group.bench_function("pointwise_min", |b| {
        b.iter(|| black_box(&f).pointwise_min(&g))
    });
    group.finish();
}

criterion_group!(benches, fits, operators);
criterion_main!(benches);
