use std::hint::black_box;
use std::sync::Arc;

use ccdiv::ratio::discounted_ratio_with;
use ccdiv::{generate_random_graph, Algorithm, ChanceInstance, Exec, SolverConfig};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn ratio(c: &mut Criterion) {
    let graph = Arc::new(generate_random_graph(100, 0.05, 1).unwrap());
    let instance = ChanceInstance::sample(graph, 2, 1000.0, 0.05).unwrap();
    let ea = SolverConfig::new(Algorithm::Ea, 2_000, 0);
    let ghc = SolverConfig::new(Algorithm::Ghc, 2_000, 0);

    let mut group = c.benchmark_group("discounted_ratio");
    group.sample_size(10);
    for (name, exec) in [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)] {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| discounted_ratio_with(black_box(&instance), &ea, &ghc, 10, 0.9, 7, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, ratio);
criterion_main!(benches);
