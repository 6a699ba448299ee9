use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use mesoscope_bench::corpus;
use mesoscope_core::textproc::segment;
use mesoscope_core::{cluster, find_exact_matches, unique_words};

fn segmentation(c: &mut Criterion) {
    let corpus = corpus(100, 500);
    c.bench_function("segment/100x500", |b| {
        b.iter(|| {
            for r in corpus.records() {
                black_box(segment(&r.id, &r.text));
            }
        })
    });
}

fn analyses(c: &mut Criterion) {
    let mut group = c.benchmark_group("analysis");
    group.sample_size(10);
    for n in [25, 50, 100] {
        let corpus = corpus(n, 500);
        group.bench_with_input(BenchmarkId::new("exact_matches", n), &corpus, |b, c| {
            b.iter(|| find_exact_matches(black_box(c)).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("unique_words", n), &corpus, |b, c| {
            b.iter(|| unique_words(black_box(c)))
        });
        group.bench_with_input(BenchmarkId::new("pdc", n), &corpus, |b, c| {
            b.iter(|| cluster(black_box(c)))
        });
    }
    group.finish();
}

criterion_group!(benches, segmentation, analyses);
criterion_main!(benches);
