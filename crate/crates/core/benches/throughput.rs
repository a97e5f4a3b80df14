use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use spikecopula::engine::CorrelationMatrix;
use spikecopula::network::{
    simulate_fpt_trials, simulate_fpt_trials_sequential, simulate_spike_trains, NetworkSpec,
    NeuronParams, SimConfig,
};

fn pair_correlated() -> NetworkSpec {
    NetworkSpec::correlated(
        vec![NeuronParams::standard(); 2],
        CorrelationMatrix::pair(0.5).unwrap(),
    )
    .unwrap()
}

fn triple_mutual_jumps() -> NetworkSpec {
    let h = vec![
        vec![0.0, 1.0, 1.0],
        vec![1.0, 0.0, 1.0],
        vec![1.0, 1.0, 0.0],
    ];
    NetworkSpec::jump_coupled(vec![NeuronParams::standard(); 3], h).unwrap()
}

// Trials are embarrassingly parallel; this is where the rayon path should win.
// With the `parallel` feature off only the sequential id runs.
fn bench_fpt_trials(c: &mut Criterion) {
    let cases: [(&str, NetworkSpec); 2] = [
        ("pair_c0.5", pair_correlated()),
        ("triple_h1", triple_mutual_jumps()),
    ];
    let n_trials = 256usize;

    let mut group = c.benchmark_group("fpt_trials");
    group.sample_size(10);
    group.throughput(Throughput::Elements(n_trials as u64));
    for (name, spec) in &cases {
        let cfg = SimConfig::fpt(n_trials);
        group.bench_with_input(BenchmarkId::new("sequential", name), spec, |b, spec| {
            b.iter(|| simulate_fpt_trials_sequential(spec, &cfg).unwrap())
        });
        #[cfg(feature = "parallel")]
        group.bench_with_input(BenchmarkId::new("parallel", name), spec, |b, spec| {
            b.iter(|| simulate_fpt_trials(spec, &cfg).unwrap())
        });
        #[cfg(not(feature = "parallel"))]
        let _ = simulate_fpt_trials;
    }
    group.finish();
}

// One long path is inherently serial; tracked so coupling-loop regressions show up.
fn bench_spike_trains(c: &mut Criterion) {
    let duration_ms = 5_000.0;
    let mut group = c.benchmark_group("spike_trains");
    group.sample_size(10);
    group.throughput(Throughput::Elements((duration_ms / 0.01) as u64));
    for (name, spec) in [
        ("pair_c0.5", pair_correlated()),
        ("triple_h1", triple_mutual_jumps()),
    ] {
        let cfg = SimConfig::spike_train(duration_ms);
        group.bench_with_input(BenchmarkId::from_parameter(name), &spec, |b, spec| {
            b.iter(|| simulate_spike_trains(spec, &cfg).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_fpt_trials, bench_spike_trains);
criterion_main!(benches);
