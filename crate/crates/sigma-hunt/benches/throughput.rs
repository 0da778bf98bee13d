//! Throughput benchmarks for the sieve kernel and the end-to-end search.
//!
//! The search group runs the same window with different worker counts, so the
//! sequential path (one worker) can be compared directly against the rayon
//! pool. Compile with `--no-default-features` to measure the build that has no
//! rayon dependency at all; every worker count then uses the sequential
//! executor and the group collapses to a single curve.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use sigma_hunt::search::{collect_solutions, SearchOptions};
use sigma_hunt::sieve::{sieve_segment, small_primes};

/// One segment of the multiplicative sieve at a representative height.
fn sieve_kernel(c: &mut Criterion) {
    let table = small_primes(200_000).expect("prime table");
    let lo = 1_000_000_000u64;
    let mut group = c.benchmark_group("sieve_segment");
    for shift in [16u32, 20, 22] {
        let width = 1u64 << shift;
        group.throughput(Throughput::Elements(width));
        group.bench_with_input(
            BenchmarkId::from_parameter(format!("2^{shift}")),
            &width,
            |b, &width| {
                b.iter(|| {
                    let seg = sieve_segment(black_box(lo), lo + width, &table).expect("segment");
                    black_box(seg.iter().map(|(_, s)| s).sum::<u64>())
                });
            },
        );
    }
    group.finish();
}

/// Full search over [1, 10^7) at several worker counts.
fn search_throughput(c: &mut Criterion) {
    let span = 10_000_000u64;
    let mut group = c.benchmark_group("search_1e7");
    group.sample_size(10);
    group.throughput(Throughput::Elements(span));
    for workers in [1usize, 2, 4, 8] {
        let opts = SearchOptions {
            segment_width: 1 << 20,
            workers,
            start_index: 0,
        };
        group.bench_with_input(BenchmarkId::new("workers", workers), &opts, |b, opts| {
            b.iter(|| {
                let found = collect_solutions(black_box(1), 1 + span, opts).expect("search");
                assert_eq!(found.len(), 113);
                black_box(found)
            });
        });
    }
    group.finish();
}

criterion_group!(benches, sieve_kernel, search_throughput);
criterion_main!(benches);
