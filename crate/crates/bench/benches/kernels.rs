use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use efetlab_bench::{function, point};
use efetlab_core::constructions::{g_factor_contour, phi_borel};
use efetlab_core::correlation::{corr_contour, corr_series, Interpolator};
use efetlab_core::zeros::winding_count;
use efetlab_core::{CoefficientSequence, PrecisionContext};

fn eval(c: &mut Criterion) {
    let mut g = c.benchmark_group("eval");
    for bits in [128u32, 256, 512] {
        let f = function(CoefficientSequence::quadratic_beta(1, 3), bits);
        let z = point(bits, 20.0, 15.0);
        g.bench_with_input(BenchmarkId::from_parameter(bits), &z, |b, z| b.iter(|| f.eval(black_box(z)).unwrap()));
    }
    g.finish();
}

fn winding(c: &mut Criterion) {
    let mut g = c.benchmark_group("winding_count");
    g.sample_size(10);
    let f = function(CoefficientSequence::cosine_oracle(), 128);
    for r in [10.0, 50.0] {
        g.bench_with_input(BenchmarkId::from_parameter(r), &r, |b, &r| b.iter(|| winding_count(&f, r).unwrap()));
    }
    g.finish();
}

fn correlation(c: &mut Criterion) {
    let mut g = c.benchmark_group("correlation");
    g.sample_size(10);
    let f = function(CoefficientSequence::random_unimodular(7), 128);
    let z = point(128, 2.5, -1.5);
    g.bench_function("series", |b| b.iter(|| corr_series(&f, 3, black_box(&z)).unwrap()));
    g.bench_function("contour", |b| b.iter(|| corr_contour(&f, 3, black_box(&z)).unwrap()));
    g.finish();
}

fn interpolation(c: &mut Criterion) {
    let mut g = c.benchmark_group("interp");
    g.sample_size(10);
    let f = function(CoefficientSequence::quadratic_beta(1, 5), 256);
    g.bench_function("build", |b| b.iter(|| Interpolator::new(&f, 1, 40.0).unwrap()));
    let interp = Interpolator::new(&f, 1, 40.0).unwrap();
    let lambda = point(256, 7.0, 0.0);
    g.bench_function("eval", |b| b.iter(|| interp.eval(black_box(&lambda)).unwrap()));
    g.finish();
}

fn borel(c: &mut Criterion) {
    let mut g = c.benchmark_group("borel");
    g.sample_size(10);
    let ctx = PrecisionContext::new(128).unwrap();
    let s = point(128, 10.0, 0.0);
    g.bench_function("phi", |b| b.iter(|| phi_borel(black_box(&s), &ctx).unwrap()));
    let z = point(128, -20.0, 5.0);
    g.bench_function("G", |b| b.iter(|| g_factor_contour(black_box(&z), &ctx).unwrap()));
    g.finish();
}

criterion_group!(benches, eval, winding, correlation, interpolation, borel);
criterion_main!(benches);
