use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use hyperxray::range::{data_fn, extend_a, hilbert_minus_at, moment_coeffs, Extension, MomentSpec};
use hyperxray::specfun::psi_nk_gamma_h;
use hyperxray::spectral::{analyze_data, svd_reconstruct};
use hyperxray::transforms::{forward_grid, xray_hyper};
use hyperxray::{
    BasisIndex, BoundaryPointGamma, DataLayout, GeodesicHoro, HilbertMode, QuadSpec, Sheet, SpectralFilter,
};
use hyperxray_bench::{dense_data, dense_field};

fn single_line(c: &mut Criterion) {
    let f = dense_field(0.0, 8);
    let q = QuadSpec::default();
    c.bench_function("xray_hyper/one_geodesic", |b| {
        b.iter(|| xray_hyper(&f, 0.0, black_box(GeodesicHoro::new(0.7, 0.3)), &q).unwrap())
    });
}

fn forward(c: &mut Criterion) {
    let mut group = c.benchmark_group("forward_grid");
    group.sample_size(10);
    let q = QuadSpec::default();
    for n in [4, 8, 16] {
        let f = dense_field(0.0, n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            b.iter(|| forward_grid(&f, DataLayout::for_band(0.0, n), &q).unwrap())
        });
    }
    group.finish();
}

fn analysis(c: &mut Criterion) {
    let mut group = c.benchmark_group("analyze_data");
    for n in [8, 16] {
        let u = dense_data(0.0, n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| b.iter(|| analyze_data(&u, n).unwrap()));
    }
    group.finish();

    let u = dense_data(0.5, 8);
    c.bench_function("svd_reconstruct/8", |b| {
        b.iter(|| svd_reconstruct(&u, 8, SpectralFilter::Truncate, None).unwrap())
    });
}

fn hilbert(c: &mut Criterion) {
    let idx = BasisIndex::new(4, 2);
    let u = extend_a(data_fn(move |g| psi_nk_gamma_h(idx, 0.0, g).unwrap()), Extension::Minus);
    let p = BoundaryPointGamma::new(0.4, 0.8, Sheet::Plus);
    let mut group = c.benchmark_group("hilbert_minus");
    group.bench_function("spectral", |b| {
        b.iter(|| hilbert_minus_at(&u, black_box(p), HilbertMode::spectral()).unwrap())
    });
    group.bench_function("pv", |b| b.iter(|| hilbert_minus_at(&u, black_box(p), HilbertMode::pv()).unwrap()));
    group.finish();
}

fn moments(c: &mut Criterion) {
    let idx = BasisIndex::new(5, 2);
    let u = data_fn(move |g| psi_nk_gamma_h(idx, 0.0, g).unwrap());
    let spec = MomentSpec::default();
    let mut group = c.benchmark_group("moment_coeffs");
    group.sample_size(10);
    group.bench_function("degree_8", |b| b.iter(|| moment_coeffs(&u, 0.0, 8, &spec).unwrap()));
    group.finish();
}

criterion_group!(benches, single_line, forward, analysis, hilbert, moments);
criterion_main!(benches);
