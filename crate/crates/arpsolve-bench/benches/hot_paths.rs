//! Benchmarks of the solver's per-iteration hot paths: PSD-cone
//! projection, the structured operator and its adjoint, and the inner
//! moment-SDP projection.

use criterion::{criterion_group, criterion_main, Criterion};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::hint::black_box;

use arpsolve::linalg::{project_psd, SymMat};
use arpsolve::lotsizing::{build_lotsizing, LotSizingInstance};
use arpsolve::projections::MomentProjector;
use arpsolve::reformulator::build_composite;

fn random_sym(n: usize, seed: u64) -> SymMat {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut s = SymMat::zeros(n);
    for j in 0..n {
        for i in 0..=j {
            s.set(i, j, rng.random_range(-1.0..1.0));
        }
    }
    s
}

fn bench_project_psd(c: &mut Criterion) {
    let s = random_sym(7, 1);
    c.bench_function("project_psd_7x7", |b| b.iter(|| project_psd(black_box(&s))));
}

fn bench_operator(c: &mut Criterion) {
    let arp = build_lotsizing(&LotSizingInstance::fixed_linear(4)).unwrap();
    let cp = build_composite(arp).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let x: Vec<f64> = (0..cp.primal_dim()).map(|_| rng.random_range(-1.0..1.0)).collect();
    let y: Vec<f64> = (0..cp.dual_dim()).map(|_| rng.random_range(-1.0..1.0)).collect();
    let mut kx = vec![0.0; cp.dual_dim()];
    let mut kty = vec![0.0; cp.primal_dim()];
    c.bench_function("apply_k_lotsizing_n4", |b| {
        b.iter(|| cp.apply_k(black_box(&x), black_box(&mut kx)))
    });
    c.bench_function("apply_k_adjoint_lotsizing_n4", |b| {
        b.iter(|| cp.apply_k_adjoint(black_box(&y), black_box(&mut kty)))
    });
}

fn bench_moment_projection(c: &mut Criterion) {
    let arp = build_lotsizing(&LotSizingInstance::fixed_quartic(2)).unwrap();
    let projector = MomentProjector::new(&arp.sos_set, 1e-8).unwrap();
    let v = vec![1.9, 2.1, 3.0, 0.0];
    c.bench_function("moment_projection_r3_omega4", |b| {
        b.iter(|| projector.project(black_box(&v)).unwrap())
    });
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(20);
    targets = bench_project_psd, bench_operator, bench_moment_projection
}
criterion_main!(benches);
