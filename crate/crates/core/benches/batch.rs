use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use effsym::batch::{map_parallel, map_sequential};
use effsym::linalg::{eig_hermitian, haar_unitary, random_effect, ComplexMatrix};
use effsym::recover::{recover_affine, RecoveryOptions};
use effsym::symmetry::{Kind, Sign, SymmetryDescriptor};

fn closure_trial(dim: usize, i: usize) -> f64 {
    let a = random_effect(dim, 2 * i as u64).unwrap();
    let b = random_effect(dim, 2 * i as u64 + 1).unwrap();
    let aba: ComplexMatrix = &(a.matrix() * b.matrix()) * a.matrix();
    eig_hermitian(&aba, 1e-9).unwrap().max()
}

fn recovery_trial(dim: usize, i: usize) -> f64 {
    let kind = if i % 2 == 0 { Kind::Unitary } else { Kind::Antiunitary };
    let u = haar_unitary(dim, i as u64).unwrap();
    let d = SymmetryDescriptor::new(kind, u, i % 4 >= 2, Sign::Plus).unwrap();
    let report = recover_affine(&d, &RecoveryOptions::default().with_seed(i as u64)).unwrap();
    report.max_residual.unwrap_or(f64::NAN)
}

fn closure(c: &mut Criterion) {
    let mut group = c.benchmark_group("closure_sweep");
    for dim in [4usize, 8] {
        let n = 256;
        group.bench_with_input(BenchmarkId::new("sequential", dim), &dim, |b, &dim| {
            b.iter(|| map_sequential(n, |i| closure_trial(dim, i)))
        });
        group.bench_with_input(BenchmarkId::new("parallel", dim), &dim, |b, &dim| {
            b.iter(|| map_parallel(n, |i| closure_trial(dim, i)))
        });
    }
    group.finish();
}

fn recovery(c: &mut Criterion) {
    let mut group = c.benchmark_group("recovery_sweep");
    group.sample_size(10);
    for dim in [3usize, 6] {
        let n = 16;
        group.bench_with_input(BenchmarkId::new("sequential", dim), &dim, |b, &dim| {
            b.iter(|| black_box(map_sequential(n, |i| recovery_trial(dim, i))))
        });
        group.bench_with_input(BenchmarkId::new("parallel", dim), &dim, |b, &dim| {
            b.iter(|| black_box(map_parallel(n, |i| recovery_trial(dim, i))))
        });
    }
    group.finish();
}

criterion_group!(benches, closure, recovery);
criterion_main!(benches);
