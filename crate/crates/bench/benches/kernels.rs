use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use fnls_bench::sample_field;
use fnls_core::dynamics::lawson_rk4_step;
use fnls_core::energy::NormalFormKernel;
use fnls_core::phase::verify_phase_lower_bound;
use fnls_core::spectral::cubic_term;
use std::hint::black_box;

fn cubic(c: &mut Criterion) {
    let mut g = c.benchmark_group("cubic_term");
    for n in [16, 64, 256] {
        let (_, v) = sample_field(n);
        g.bench_with_input(BenchmarkId::from_parameter(n), &v, |b, v| {
            b.iter(|| cubic_term(black_box(v), n).unwrap())
        });
    }
    g.finish();
}

fn rk4(c: &mut Criterion) {
    let mut g = c.benchmark_group("lawson_rk4_step");
    for n in [16, 64, 256] {
        let (p, v) = sample_field(n);
        g.bench_with_input(BenchmarkId::from_parameter(n), &v, |b, v| {
            b.iter(|| lawson_rk4_step(black_box(v), 1e-3, &p))
        });
    }
    g.finish();
}

fn correction(c: &mut Criterion) {
    let mut g = c.benchmark_group("normal_form");
    g.sample_size(20);
    for n in [8, 16, 32] {
        let (p, v) = sample_field(n);
        let kernel = NormalFormKernel::new(p.s, p.alpha, n).unwrap();
        g.bench_with_input(BenchmarkId::new("correction", n), &v, |b, v| {
            b.iter(|| kernel.correction(black_box(v)))
        });
        g.bench_with_input(BenchmarkId::new("derivative_terms", n), &v, |b, v| {
            b.iter(|| kernel.derivative_terms_lab(black_box(v), 1.0))
        });
    }
    g.finish();
}

fn phase_scan(c: &mut Criterion) {
    let mut g = c.benchmark_group("phase_scan");
    g.sample_size(10);
    for r in [16, 32] {
        g.bench_function(BenchmarkId::from_parameter(r), |b| {
            b.iter(|| verify_phase_lower_bound(black_box(1.5), r).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, cubic, rk4, correction, phase_scan);
criterion_main!(benches);
