use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use fixcount_core::pisano::{pisano_bruteforce, pisano_general};
use fixcount_core::realize::{dold_scan, orbit_count};
use fixcount_core::sequences::{fib_mod, SequenceSpec};

fn bench_fib_mod(c: &mut Criterion) {
    let mut group = c.benchmark_group("fib_mod");
    for &index in &[1u128 << 20, 1 << 40, 1 << 60] {
        group.bench_with_input(BenchmarkId::from_parameter(index), &index, |b, &idx| {
            b.iter(|| fib_mod(black_box(idx), black_box(1_000_000_007)).unwrap());
        });
    }
    group.finish();
}

fn bench_dold_scan(c: &mut Criterion) {
    let phi = SequenceSpec::parse("5*fib^2").unwrap();
    let mut group = c.benchmark_group("dold_scan_five_fib_squared");
    group.sample_size(10);
    for &max_n in &[200u64, 500, 1000] {
        group.bench_with_input(BenchmarkId::from_parameter(max_n), &max_n, |b, &max_n| {
            b.iter(|| dold_scan(black_box(&phi), black_box(max_n)).unwrap());
        });
    }
    group.finish();
}

fn bench_orbit_count(c: &mut Criterion) {
    let phi = SequenceSpec::parse("5*fib^2").unwrap();
    c.bench_function("orbit_count_phi_30", |b| {
        b.iter(|| orbit_count(black_box(&phi), black_box(30)).unwrap());
    });
}

fn bench_pisano(c: &mut Criterion) {
    let mut group = c.benchmark_group("pisano");
    group.bench_function("bruteforce_99991", |b| {
        b.iter(|| pisano_bruteforce(black_box(99_991)).unwrap());
    });
    group.bench_function("wall_guided_99991", |b| {
        b.iter(|| pisano_general(black_box(99_991)).unwrap());
    });
    group.finish();
}

criterion_group!(
    benches,
    bench_fib_mod,
    bench_dold_scan,
    bench_orbit_count,
    bench_pisano
);
criterion_main!(benches);
