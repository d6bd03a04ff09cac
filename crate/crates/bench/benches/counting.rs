use chamber_bench::instances;
use chamber_core::{run_suite, Counter, Suite};
use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

fn counting(c: &mut Criterion) {
    let counter = Counter::default();
    let mut group = c.benchmark_group("count");
    group.sample_size(10);
    for inst in instances() {
        group.bench_with_input(BenchmarkId::new("confined_dp", inst.name), &inst, |b, i| {
            b.iter(|| counter.count_confined(&i.spec, &i.u, &i.v, black_box(i.n)).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("reflection", inst.name), &inst, |b, i| {
            b.iter(|| counter.count_reflection(&i.spec, &i.u, &i.v, black_box(i.n)).unwrap())
        });
    }
    group.finish();
}

fn suites(c: &mut Criterion) {
    let mut group = c.benchmark_group("verify");
    group.sample_size(10);
    for suite in [Suite::Oracle, Suite::Det, Suite::Schur] {
        group.bench_function(suite.name(), |b| b.iter(|| run_suite(suite, black_box(7)).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, counting, suites);
criterion_main!(benches);
