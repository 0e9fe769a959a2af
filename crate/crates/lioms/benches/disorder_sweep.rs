//! Parallel versus sequential disorder sweeps, plus the two diagonal
//! extraction paths. Run with `cargo bench -p lioms`.

use criterion::{criterion_group, criterion_main, Criterion};

use lioms::harness::{map_tasks, map_tasks_serial};
use lioms::{
    diagonal_hamiltonian, entangle::diagonal_hamiltonian_termwise, tn_entropy_trace, ChainSpec,
    TimeGrid, TwoLayerUnitary, WindowLayout,
};

const BENCH_SEED: u64 = 7_777;

fn merit_task(realization: u64) -> f64 {
    lioms::harness::tnm_merit_one(BENCH_SEED, realization, 4, 1.0, 1.0, 12.0, 12)
        .unwrap()
        .delta_total
}

fn bench_merit_sweep(c: &mut Criterion) {
    let tasks: Vec<u64> = (0..8).collect();
    let mut group = c.benchmark_group("merit_sweep_b4_8real");
    group.sample_size(10);
    group.bench_function("serial", |b| {
        b.iter(|| {
            map_tasks_serial(&tasks, |&r| Ok(merit_task(r)))
                .unwrap()
                .iter()
                .sum::<f64>()
        })
    });
    group.bench_function("parallel_4_workers", |b| {
        b.iter(|| {
            map_tasks(&tasks, 4, |&r| Ok(merit_task(r)))
                .unwrap()
                .iter()
                .sum::<f64>()
        })
    });
    group.finish();
}

fn bench_entropy_trace(c: &mut Criterion) {
    let grid = TimeGrid::log_spaced(0.1, 1e6, 24).unwrap();
    let mut group = c.benchmark_group("entropy_trace_w15");
    group.sample_size(10);
    group.bench_function("b4_dense_path", |b| {
        let spec = ChainSpec::sampled(BENCH_SEED, 0, 8, 1.0, 1.0, 15.0).unwrap();
        let layout = WindowLayout::new(4, 1).unwrap();
        b.iter(|| tn_entropy_trace(&spec, &layout, &grid, 12, BENCH_SEED, 0).unwrap())
    });
    group.finish();
}

fn bench_diagonal_paths(c: &mut Criterion) {
    let spec = ChainSpec::sampled(BENCH_SEED, 1, 8, 1.0, 1.0, 15.0).unwrap();
    let layout = WindowLayout::new(4, 1).unwrap();
    let net = TwoLayerUnitary::build(&spec, &layout, 12).unwrap();
    let mut group = c.benchmark_group("diagonal_b4");
    group.sample_size(20);
    group.bench_function("dense", |b| {
        b.iter(|| diagonal_hamiltonian(&net, &spec, 12).unwrap())
    });
    group.bench_function("termwise", |b| {
        b.iter(|| diagonal_hamiltonian_termwise(&net, &spec).unwrap())
    });
    group.finish();
}

criterion_group!(
    benches,
    bench_merit_sweep,
    bench_entropy_trace,
    bench_diagonal_paths
);
criterion_main!(benches);
