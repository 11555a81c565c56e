use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use eqcipher_bench::channel_fixture;
use eqcipher_core::cipher::{avg_channel, avg_channel_serial, indist_distance};
use eqcipher_core::hashfam::{verify_xor_universal, KeySpec, PermutationFamily};
use eqcipher_core::pauli::{conjugate, PauliMask};
use eqcipher_core::qmatrix::hermitian_eigen;

fn bench_conjugate(c: &mut Criterion) {
    let mut group = c.benchmark_group("conjugate");
    for n in [2u32, 3, 4, 5] {
        let (state, _) = channel_fixture(n, 0, 0);
        let mask = PauliMask::new(n, (1 << n) - 1, 1).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| conjugate(black_box(&state), black_box(&mask)).unwrap())
        });
    }
    group.finish();
}

fn bench_channel(c: &mut Criterion) {
    let mut group = c.benchmark_group("avg_channel");
    group.sample_size(10);
    for n in [2u32, 3, 4] {
        let (state, params) = channel_fixture(n, 1, 2 * n);
        group.bench_with_input(BenchmarkId::new("parallel", n), &n, |b, _| {
            b.iter(|| avg_channel(black_box(&state), &params).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("serial", n), &n, |b, _| {
            b.iter(|| avg_channel_serial(black_box(&state), &params).unwrap())
        });
    }
    group.finish();
}

fn bench_distance(c: &mut Criterion) {
    let mut group = c.benchmark_group("indist_distance");
    group.sample_size(10);
    for n in [2u32, 3] {
        let (state, params) = channel_fixture(n, 1, n);
        let out = avg_channel(&state, &params).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| indist_distance(black_box(&out)).unwrap())
        });
    }
    group.finish();
}

fn bench_eigen(c: &mut Criterion) {
    let mut group = c.benchmark_group("hermitian_eigen");
    for n in [3u32, 4, 5, 6] {
        let (state, _) = channel_fixture(n, 0, 0);
        group.bench_with_input(BenchmarkId::from_parameter(1 << n), &n, |b, _| {
            b.iter(|| hermitian_eigen(black_box(state.matrix())).unwrap())
        });
    }
    group.finish();
}

fn bench_family(c: &mut Criterion) {
    let mut group = c.benchmark_group("verify_xor_universal");
    group.sample_size(10);
    for m in [6u32, 8, 10] {
        let fam = PermutationFamily::standard(m).unwrap();
        let keys = KeySpec::new(m, m).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(m), &m, |b, _| {
            b.iter(|| verify_xor_universal(&fam, &keys).unwrap())
        });
    }
    group.finish();
}

criterion_group!(
    benches,
    bench_conjugate,
    bench_channel,
    bench_distance,
    bench_eigen,
    bench_family
);
criterion_main!(benches);
