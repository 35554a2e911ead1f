//! Sequential against data-parallel execution on the three hot loops.
//! Build without default features to bench the sequential core alone.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use flatmagic::experiments::{run_experiment_with, ExperimentConfig, ExperimentKind};
use flatmagic::pauli::PauliSweep;
use flatmagic::seed::SeedTree;
use flatmagic::stabilizer::exhaustive_clifford_average_with;
use flatmagic::statevec::PureState;
use flatmagic::Exec;

fn strategies() -> Vec<(&'static str, Exec)> {
    vec![
        ("sequential", Exec::Sequential),
        #[cfg(feature = "parallel")]
        ("parallel", Exec::Parallel),
    ]
}

fn xi_sweep(c: &mut Criterion) {
    let mut group = c.benchmark_group("xi_sweep");
    for n in [6, 8] {
        let state = PureState::random(n, &mut SeedTree::new(n as u64).rng()).unwrap();
        for (name, exec) in strategies() {
            let sweep = PauliSweep { exec, ..PauliSweep::default() };
            group.bench_with_input(BenchmarkId::new(name, n), &state, |b, s| {
                b.iter(|| sweep.stabilizer_linear_entropy(s).unwrap())
            });
        }
    }
    group.finish();
}

fn exhaustive_average(c: &mut Criterion) {
    let mut group = c.benchmark_group("exhaustive_clifford_average");
    group.sample_size(10);
    let state = PureState::random(2, &mut SeedTree::new(1).rng()).unwrap();
    for (name, exec) in strategies() {
        group.bench_function(name, |b| {
            b.iter(|| exhaustive_clifford_average_with(&state, exec).unwrap())
        });
    }
    group.finish();
}

fn orbit_experiment(c: &mut Criterion) {
    let mut group = c.benchmark_group("orbit_average_n8");
    group.sample_size(10);
    let mut cfg = ExperimentConfig::new(ExperimentKind::OrbitAverage);
    cfg.n = Some(8);
    cfg.thetas = vec![std::f64::consts::FRAC_PI_4];
    cfg.layers = 20;
    cfg.realizations = 32;
    for (name, exec) in strategies() {
        group.bench_function(name, |b| b.iter(|| run_experiment_with(&cfg, exec).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, xi_sweep, exhaustive_average, orbit_experiment);
criterion_main!(benches);
