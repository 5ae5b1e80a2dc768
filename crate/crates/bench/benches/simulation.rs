use chainflow::sim::{replication_rng, run_replications, simulate_once, DEFAULT_REPLICATIONS};
use chainflow::LeadTimeModel;
use chainflow_bench::{baseline_plan, instance};
use criterion::{criterion_group, criterion_main, Criterion};

fn simulation(c: &mut Criterion) {
    let inst = instance("auto14.json");
    let plan = baseline_plan();
    let model = LeadTimeModel::default();
    c.bench_function("one replication auto14", |b| {
        let mut rng = replication_rng(42, 0);
        b.iter(|| simulate_once(&inst, &plan, &model, &mut rng).unwrap())
    });
    let mut group = c.benchmark_group("replications");
    group.sample_size(20);
    group.bench_function("300 auto14", |b| {
        b.iter(|| run_replications(&inst, &plan, &model, DEFAULT_REPLICATIONS, 42).unwrap())
    });
    group.finish();
}

criterion_group!(benches, simulation);
criterion_main!(benches);
