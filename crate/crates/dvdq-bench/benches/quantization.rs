use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use dvdq_bench::{activation_fixture, weight_fixture};
use dvdq_core::*;

fn bench_fht(c: &mut Criterion) {
    let mut group = c.benchmark_group("fht_rows");
    for dim in [256usize, 1024, 4096] {
        let ctx = HadamardContext::new(dim).unwrap();
        let x = activation_fixture(1, 16, dim);
        group.bench_with_input(BenchmarkId::from_parameter(dim), &dim, |b, _| {
            b.iter(|| fht_rows(black_box(&x), &ctx).unwrap())
        });
    }
    group.finish();
}

fn bench_pbq_search(c: &mut Criterion) {
    let mut group = c.benchmark_group("pbq_search_channel");
    let channel = weight_fixture(2, 1, 4096);
    for k in [10usize, 100] {
        let cfg = PbqConfig::new(4, k);
        group.bench_with_input(BenchmarkId::from_parameter(k), &k, |b, _| {
            b.iter(|| pbq_search_channel(black_box(channel.data()), &cfg).unwrap())
        });
    }
    group.finish();
}

fn bench_quantize(c: &mut Criterion) {
    let w = weight_fixture(3, 256, 256);
    let params = minmax_params(&w, 4, ChannelAxis::Row).unwrap();
    c.bench_function("quantize_256x256_4bit", |b| {
        b.iter(|| quantize(black_box(&w), &params, ChannelAxis::Row).unwrap())
    });
}

fn bench_pack(c: &mut Criterion) {
    let w = weight_fixture(4, 256, 256);
    let params = minmax_params(&w, 4, ChannelAxis::Row).unwrap();
    let q = quantize(&w, &params, ChannelAxis::Row).unwrap();
    let bytes = pack(&q).unwrap();
    c.bench_function("pack_256x256_4bit", |b| b.iter(|| pack(black_box(&q)).unwrap()));
    c.bench_function("unpack_256x256_4bit", |b| b.iter(|| unpack(black_box(&bytes)).unwrap()));
}

fn bench_arq_activation(c: &mut Criterion) {
    let ctx = HadamardContext::new(256).unwrap();
    let x = activation_fixture(5, 32, 256);
    c.bench_function("arq_quantize_activation_32x256", |b| {
        b.iter(|| arq_quantize_activation(black_box(&x), &ctx, 4).unwrap())
    });
}

fn bench_schedule_replay(c: &mut Criterion) {
    let increments: Vec<f64> = (0..1000).map(|i| (i % 7) as f64 * 0.01).collect();
    c.bench_function("run_schedule_1000_steps", |b| {
        b.iter(|| run_schedule(black_box(&increments), 0.1, 4, 8).unwrap())
    });
}

criterion_group!(
    benches,
    bench_fht,
    bench_pbq_search,
    bench_quantize,
    bench_pack,
    bench_arq_activation,
    bench_schedule_replay
);
criterion_main!(benches);
