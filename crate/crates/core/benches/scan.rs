use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use multiway_disc::generators::{random_table, Dominance};
use multiway_disc::search::exact_min_discrepancy_with;
use multiway_disc::{partition_discrepancy_with, Exec, Partition, ScanConfig, SearchConfig};

fn modes() -> [(&'static str, Exec); 2] {
    [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)]
}

fn scan(c: &mut Criterion) {
    let dom = Dominance::new(0.5, 2.0, 0.5, 2.0);
    let mut group = c.benchmark_group("scan");
    for size in [10usize, 14] {
        let t = random_table(size, size, dom, 1, 10_000).unwrap();
        let p = Partition::trivial(size, size);
        for (name, exec) in modes() {
            let cfg = ScanConfig { budget: u64::MAX, exec };
            group.bench_with_input(BenchmarkId::new(name, size), &size, |b, _| {
                b.iter(|| partition_discrepancy_with(&t, &p, &cfg).unwrap())
            });
        }
    }
    group.finish();
}

fn exact(c: &mut Criterion) {
    let dom = Dominance::new(0.5, 2.0, 0.5, 2.0);
    let t = random_table(6, 6, dom, 2, 10_000).unwrap();
    let mut group = c.benchmark_group("exact_k2");
    group.sample_size(10);
    for (name, exec) in modes() {
        let cfg = SearchConfig { exec, ..Default::default() };
        group.bench_function(name, |b| b.iter(|| exact_min_discrepancy_with(&t, 2, &cfg).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, scan, exact);
criterion_main!(benches);
