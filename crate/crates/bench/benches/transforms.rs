//! Walsh transform benchmarks: the factored transform across field sizes,
//! and factored vs. definitional cost on a field small enough for both.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use pary_bench::function;
use pary_core::{walsh_fast, walsh_naive};

fn bench_walsh_fast(c: &mut Criterion) {
    let mut group = c.benchmark_group("walsh_fast");
    for m in [6u32, 8, 10] {
        let f = function(3, m, "Tr(x^2 + 2*x^4)");
        let q = f.ctx().q();
        if m == 10 {
            group.sample_size(20);
        }
        group.bench_with_input(BenchmarkId::from_parameter(format!("3^{m} (q={q})")), &f, |b, f| {
            b.iter(|| walsh_fast(f).expect("transform succeeds"))
        });
    }
    group.finish();
}

fn bench_fast_vs_naive(c: &mut Criterion) {
    let mut group = c.benchmark_group("walsh_small_field");
    let f = function(3, 5, "Tr(2*x - x^5)");
    group.bench_function("fast_3^5", |b| b.iter(|| walsh_fast(&f).expect("transform succeeds")));
    group.bench_function("naive_3^5", |b| b.iter(|| walsh_naive(&f).expect("transform succeeds")));
    group.finish();
}

criterion_group!(benches, bench_walsh_fast, bench_fast_vs_naive);
criterion_main!(benches);
