//! Sequential versus rayon-parallel execution of the data-parallel kernels.

use std::hint::black_box;

use anchorlab::anchor::ImageDims;
use anchorlab::augment::adhesion_warp;
use anchorlab::frame::warp_raster;
use anchorlab::metrics::hit_area_fraction_mc;
use anchorlab::predictor::{evaluate, PredictorKind};
use anchorlab::protocol::stratified_kfold;
use anchorlab::synth::{generate_with, render, SynthConfig};
use anchorlab::Exec;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn bench_warp_raster(c: &mut Criterion) {
    let cfg = SynthConfig { count: 1, image: ImageDims::new(1024, 768).unwrap(), ..SynthConfig::default() };
    let sample = generate_with(&cfg, Exec::Sequential).unwrap().remove(0);
    let src = render(&sample, Exec::Parallel).unwrap();
    let warp = adhesion_warp(&sample, 0.1).unwrap();
    let mut group = c.benchmark_group("warp_raster_1024x768");
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| warp_raster(black_box(&warp), &src, sample.image, exec).unwrap())
        });
    }
    group.finish();
}

fn bench_generate(c: &mut Criterion) {
    let cfg = SynthConfig { count: 5000, ..SynthConfig::default() };
    let mut group = c.benchmark_group("generate_5000");
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| generate_with(black_box(&cfg), exec).unwrap())
        });
    }
    group.finish();
}

fn bench_monte_carlo(c: &mut Criterion) {
    let img = ImageDims::new(700, 700).unwrap();
    let mut group = c.benchmark_group("hit_area_mc_1e6");
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| hit_area_fraction_mc(img, 7.0, black_box(1_000_000), 1, exec))
        });
    }
    group.finish();
}

fn bench_evaluate(c: &mut Criterion) {
    let samples = generate_with(&SynthConfig { count: 3000, ..SynthConfig::default() }, Exec::Parallel).unwrap();
    let plan = stratified_kfold(&samples, 10, 0).unwrap();
    let mut group = c.benchmark_group("evaluate_radial_10fold");
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| evaluate(PredictorKind::AnchorRadial, black_box(&samples), &plan, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_warp_raster, bench_generate, bench_monte_carlo, bench_evaluate);
criterion_main!(benches);
