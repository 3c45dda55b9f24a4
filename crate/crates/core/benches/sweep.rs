use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use polarscatter::sim::{run_sweep_with, Execution, Scheme, SimConfig};

fn config() -> SimConfig {
    SimConfig {
        k: 48,
        trials: 16,
        seed: 1,
        snr_db: vec![-16.0, -12.0],
        schemes: vec![Scheme::Sozu, Scheme::Hamming74],
        ..SimConfig::default()
    }
}

fn sweep(c: &mut Criterion) {
    let cfg = config();
    let mut group = c.benchmark_group("sweep");
    group.sample_size(10);
    for (name, exec) in [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)] {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| run_sweep_with(&cfg, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, sweep);
criterion_main!(benches);
