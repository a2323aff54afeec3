use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use fmo_core::dynamics::evolve_with;
use fmo_core::experiments::{realization_hamiltonian, sweep_dephasing, SweepConfig};
use fmo_core::noise::{NoiseConfig, NoiseKind};
use fmo_core::Propagator;

fn propagators(c: &mut Criterion) {
    let cfg = SweepConfig::default();
    let base = cfg.system.build().unwrap();
    let ph = realization_hamiltonian(&cfg, &base, &cfg.noise, 0, 0).unwrap();
    let mut g = c.benchmark_group("evolve");
    g.sample_size(10);
    for method in [Propagator::Eigen, Propagator::Chebyshev] {
        g.bench_with_input(
            BenchmarkId::from_parameter(format!("{method:?}")),
            &method,
            |b, &m| b.iter(|| evolve_with(black_box(&ph), 0.05, m).unwrap()),
        );
    }
    g.finish();
}

fn noise(c: &mut Criterion) {
    let mut g = c.benchmark_group("noise");
    for kind in [NoiseKind::UniformWhite, NoiseKind::Colored] {
        let cfg = NoiseConfig {
            kind,
            segments: 128,
            ..NoiseConfig::default()
        };
        g.bench_function(format!("{kind:?}"), |b| {
            b.iter(|| cfg.generate(black_box(7)).unwrap())
        });
    }
    g.finish();
}

fn sweep(c: &mut Criterion) {
    let cfg = SweepConfig {
        amplitudes_per_mm: vec![0.0, 0.5, 1.0],
        realizations: 4,
        ..SweepConfig::default()
    };
    let mut g = c.benchmark_group("sweep");
    g.sample_size(10);
    g.bench_function("3x4", |b| {
        b.iter(|| sweep_dephasing(black_box(&cfg)).unwrap())
    });
    g.finish();
}

criterion_group!(benches, propagators, noise, sweep);
criterion_main!(benches);
