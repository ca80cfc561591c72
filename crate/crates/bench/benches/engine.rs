use std::hint::black_box;

use cfcomm_core::engine::{path_sum, run_monte_carlo_with_workers};
use cfcomm_core::protocol::{transmit_image, Link, MonoImage};
use cfcomm_core::scenario::{slaz_ideal, slaz_m4n2};
use cfcomm_core::{compile, run_exact, Logic};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};

fn exact(c: &mut Criterion) {
    let mut g = c.benchmark_group("run_exact");
    for m in [4u32, 16, 64] {
        let program = compile(&slaz_ideal(m, 4), Logic::Zero).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(m), &program, |b, p| {
            b.iter(|| run_exact(black_box(p)).unwrap())
        });
    }
    g.finish();
}

fn paths(c: &mut Criterion) {
    let mut g = c.benchmark_group("path_sum");
    for (m, n) in [(4u32, 2u32), (5, 3), (5, 4)] {
        let program = compile(&slaz_ideal(m, n), Logic::Zero).unwrap();
        g.bench_with_input(BenchmarkId::new("M_N", format!("{m}_{n}")), &program, |b, p| {
            b.iter(|| path_sum(black_box(p)).unwrap())
        });
    }
    g.finish();
}

fn monte_carlo(c: &mut Criterion) {
    let s = slaz_m4n2();
    let program = compile(&s, Logic::Zero).unwrap();
    let trials = 100_000;
    let mut g = c.benchmark_group("monte_carlo");
    g.throughput(Throughput::Elements(trials));
    g.sample_size(20);
    for workers in [1usize, 4] {
        g.bench_with_input(BenchmarkId::new("workers", workers), &workers, |b, &w| {
            b.iter(|| run_monte_carlo_with_workers(&program, &s.noise.source, &s.noise, trials, 1, w).unwrap())
        });
    }
    g.finish();
}

fn transmit(c: &mut Criterion) {
    let s = slaz_m4n2();
    let link = Link::new(&s, &s.noise).unwrap();
    let img = MonoImage::new(32, 32, (0..1024).map(|i| i % 3 == 0).collect()).unwrap();
    let mut g = c.benchmark_group("transmit_image");
    g.throughput(Throughput::Elements(1024));
    g.sample_size(20);
    g.bench_function("32x32", |b| {
        b.iter(|| transmit_image(&link, black_box(&img), 5).unwrap())
    });
    g.finish();
}

criterion_group!(benches, exact, paths, monte_carlo, transmit);
criterion_main!(benches);
