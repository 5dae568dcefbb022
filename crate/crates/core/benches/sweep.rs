use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use crscl::oracle::{error_report, CaseProfile, Engine, Execution, ProfileName};

fn sweep(c: &mut Criterion) {
    let mut group = c.benchmark_group("error_report");
    group.sample_size(10);
    for name in [ProfileName::Safe, ProfileName::SubnormalParts] {
        let profile = CaseProfile::new(name, 1, 5_000);
        for (label, execution) in [
            ("sequential", Execution::Sequential),
            ("parallel", Execution::Parallel),
        ] {
            group.bench_with_input(BenchmarkId::new(label, name), &profile, |b, p| {
                b.iter(|| error_report::<f32>(Engine::Crscl, p, execution))
            });
        }
    }
    group.finish();
}

criterion_group!(benches, sweep);
criterion_main!(benches);
