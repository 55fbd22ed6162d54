use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use polariton_core::grid::{MomentumGrid, SpatialGrid};
use polariton_core::manybody::{
    build_hamiltonian, ground_state, lieb_liniger_table, BetheOptions, Boundary, Interaction, LanczosOptions,
    LatticeSpec,
};
use polariton_core::propagation::{run_plan, ControlSchedule, ProtocolOptions, PulseSpec};
use polariton_core::spectra::{band_structure, Scheme};
use polariton_core::{Exec, PhysicalParams};

const POLICIES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn bands(c: &mut Criterion) {
    let p = PhysicalParams::stationary(1.0, 1.3, 0.8, 4.0).with_gamma(0.2);
    let grid = MomentumGrid::symmetric(3.0, 4001).unwrap();
    let mut group = c.benchmark_group("band_structure");
    for (name, exec) in POLICIES {
        group.bench_function(name, |b| b.iter(|| band_structure(&p, black_box(&grid), Scheme::Stationary, exec)));
    }
    group.finish();
}

fn lattice(c: &mut Criterion) {
    let spec = LatticeSpec::new(14, 5, Boundary::Periodic, Interaction::Contact { u: 2.0 });
    let mut group = c.benchmark_group("lattice");
    group.sample_size(10);
    for (name, exec) in POLICIES {
        let (_, h) = build_hamiltonian(&spec, exec).unwrap();
        let x = vec![1.0; h.dim];
        let mut y = vec![0.0; h.dim];
        group.bench_with_input(BenchmarkId::new("matvec", name), &x, |b, x| b.iter(|| h.apply(x, &mut y)));
        group.bench_function(BenchmarkId::new("ground_state", name), |b| {
            b.iter(|| ground_state(black_box(&spec), &LanczosOptions::default(), exec))
        });
    }
    group.finish();
}

fn bethe(c: &mut Criterion) {
    let gammas: Vec<f64> = (0..32).map(|i| 0.1 * 1.25f64.powi(i)).collect();
    let opts = BetheOptions {
        nodes: 64,
        ..Default::default()
    };
    let mut group = c.benchmark_group("bethe_table");
    group.sample_size(10);
    for (name, exec) in POLICIES {
        group.bench_function(name, |b| b.iter(|| lieb_liniger_table(black_box(&gammas), &opts, exec)));
    }
    group.finish();
}

fn protocol(c: &mut Criterion) {
    let p = PhysicalParams::stationary(1.0, 1.0, 0.5, 2.0);
    let grid = SpatialGrid::new(256.0, 2048).unwrap();
    let sched = ControlSchedule::constant(5.0, 1.0, 0.5);
    let pulse = PulseSpec::new(0.0, 8.0);
    let mut group = c.benchmark_group("protocol");
    group.sample_size(10);
    for (name, exec) in POLICIES {
        let opts = ProtocolOptions {
            exec,
            ..Default::default()
        };
        group.bench_function(name, |b| b.iter(|| run_plan(&p, &grid, &sched, black_box(&pulse), &opts)));
    }
    group.finish();
}

criterion_group!(benches, bands, lattice, bethe, protocol);
criterion_main!(benches);
