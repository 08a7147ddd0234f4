use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use dyadic_bench::interval;
use dyadic_core::rational::q;
use dyadic_core::space::{gray_digit, gray_subbase};
use dyadic_core::{enumerate_k, is_cusl, BottomedSeq, ExtDigit, Point};

fn digits(c: &mut Criterion) {
    let x = q(355, 1130);
    c.bench_function("gray_digit n=16", |b| {
        b.iter(|| gray_digit(black_box(&x), black_box(16)))
    });
    let g = gray_subbase(32);
    let p = Point::scalar(q(1, 3));
    c.bench_function("phi depth 32", |b| b.iter(|| g.phi(black_box(&p), 32)));
}

fn sequences(c: &mut Criterion) {
    let all = BottomedSeq::enumerate(6, &ExtDigit::BINARY);
    c.bench_function("join all pairs of length 6", |b| {
        b.iter(|| {
            let mut joined = 0usize;
            for s in all.iter().step_by(7) {
                for t in &all {
                    joined += s.join(t).is_ok() as usize;
                }
            }
            joined
        })
    });
}

fn slices(c: &mut Criterion) {
    let mut group = c.benchmark_group("kslice");
    let g = gray_subbase(8);
    for depth in [4usize, 6] {
        let model = interval(1024);
        group.bench_with_input(BenchmarkId::new("enumerate", depth), &depth, |b, &d| {
            b.iter(|| enumerate_k(&g, &model, d).unwrap())
        });
        let slice = enumerate_k(&g, &model, depth).unwrap();
        group.bench_with_input(BenchmarkId::new("is_cusl", depth), &slice, |b, s| b.iter(|| is_cusl(s)));
    }
    group.finish();
}

criterion_group!(benches, digits, sequences, slices);
criterion_main!(benches);
