use std::hint::black_box;
use std::time::Duration;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use sdfclass_bench::{checkerboard_fixture, linear_fixture};
use sdfclass_core::dataset::Metric;
use sdfclass_core::estimate::{initial_estimates, midpoint_refine};
use sdfclass_core::kernel::{fit_kernel, gram};
use sdfclass_core::linear::{fit_linear, iterate_linear};

fn bench_initial_estimates(c: &mut Criterion) {
    let mut group = c.benchmark_group("initial_estimates");
    for m in [200, 1000, 4000] {
        let data = linear_fixture(m);
        group.bench_with_input(BenchmarkId::from_parameter(m), &data, |b, data| {
            b.iter(|| initial_estimates(black_box(data), &Metric::Euclidean).unwrap());
        });
    }
    group.finish();
}

fn bench_gram(c: &mut Criterion) {
    let mut group = c.benchmark_group("gram");
    for m in [200, 500, 1000] {
        let data = checkerboard_fixture(m);
        group.bench_with_input(BenchmarkId::from_parameter(m), &data, |b, data| {
            b.iter(|| gram(black_box(data.points()), 0.5, &Metric::Euclidean).unwrap());
        });
    }
    group.finish();
}

fn bench_fit_kernel(c: &mut Criterion) {
    let mut group = c.benchmark_group("fit_kernel");
    group.sample_size(10).measurement_time(Duration::from_secs(10));
    for m in [200, 500, 1000] {
        let data = checkerboard_fixture(m);
        let est = midpoint_refine(&initial_estimates(&data, &Metric::Euclidean).unwrap()).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(m), &m, |b, _| {
            b.iter(|| {
                fit_kernel(
                    black_box(data.points()),
                    est.b(),
                    0.5,
                    1e-5,
                    &Metric::Euclidean,
                )
                .unwrap()
            });
        });
    }
    group.finish();
}

fn bench_kernel_predict(c: &mut Criterion) {
    let data = checkerboard_fixture(1000);
    let est = midpoint_refine(&initial_estimates(&data, &Metric::Euclidean).unwrap()).unwrap();
    let model = fit_kernel(data.points(), est.b(), 0.5, 1e-5, &Metric::Euclidean).unwrap();
    let queries = checkerboard_fixture(2000);
    c.bench_function("kernel_predict_batch_2000x1000", |b| {
        b.iter(|| model.predict_batch(black_box(queries.points())).unwrap());
    });
}

fn bench_linear_fits(c: &mut Criterion) {
    let data = linear_fixture(5000);
    let est = midpoint_refine(&initial_estimates(&data, &Metric::Euclidean).unwrap()).unwrap();
    c.bench_function("fit_linear_5000x2", |b| {
        b.iter(|| fit_linear(black_box(data.points()), est.b()).unwrap());
    });
    let small = linear_fixture(1000);
    c.bench_function("iterate_linear_1000x2_iter5", |b| {
        b.iter(|| iterate_linear(black_box(&small), &Metric::Euclidean, 5).unwrap());
    });
}

criterion_group!(
    benches,
    bench_initial_estimates,
    bench_gram,
    bench_fit_kernel,
    bench_kernel_predict,
    bench_linear_fits
);
criterion_main!(benches);
