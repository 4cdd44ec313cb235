use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use sse_core::decoder::{algorithm1_decode_with, ToyInstance};
use sse_core::par::Execution;
use sse_core::rates::rate_curve;
use sse_core::stats::{concentration_experiment, ConcentrationConfig};
use sse_core::{ChannelParams, DecoderConfig, Seeder};

const MODES: [(&str, Execution); 2] = [
    ("sequential", Execution::Sequential),
    ("parallel", Execution::Parallel),
];

fn concentration(c: &mut Criterion) {
    let params = ChannelParams::from_normalized(20_000, 2.0, 2.0, 0.2).unwrap();
    let config = ConcentrationConfig::new(params, 16, 7);
    let mut group = c.benchmark_group("concentration_16_trials");
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| concentration_experiment(black_box(&config), exec).unwrap())
        });
    }
    group.finish();
}

fn decoder(c: &mut Criterion) {
    let params = ChannelParams::new(32, 8, 6, 0.1).unwrap();
    let inst = ToyInstance::sample(&params, 8, &Seeder::new(3)).unwrap();
    let config = DecoderConfig::default();
    let mut group = c.benchmark_group("decoder_k6");
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| {
                algorithm1_decode_with(
                    &inst.codebook,
                    black_box(inst.output.reads()),
                    &params,
                    &config,
                    exec,
                )
                .unwrap()
            })
        });
    }
    group.finish();
}

fn rate_grid(c: &mut Criterion) {
    let grid: Vec<f64> = (1..=2000).map(|i| i as f64 * 0.0025).collect();
    let deltas = [0.0, 0.1, 0.2, 0.3, 0.5];
    let mut group = c.benchmark_group("rate_curve_10k_points");
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| rate_curve(black_box(&grid), 1.75, &deltas, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(
    name = benches;
    config = Criterion::default().sample_size(10).configure_from_args();
    targets = concentration, decoder, rate_grid
);
criterion_main!(benches);
