use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use otable_bench::correct_tables;
use otable_core::kernel::random::haar_state;
use otable_core::mpc::TablePool;
use otable_core::qhe::{run_scheme1, table_count, CliffordTCircuit};
use otable_core::seed::stream_rng;

fn scheme(c: &mut Criterion) {
    let mut group = c.benchmark_group("run_scheme1");
    group.sample_size(20);
    for t in [0, 1, 3] {
        let mut rng = stream_rng(t as u64, 0);
        let circuit = CliffordTCircuit::random(3, t, 4, &mut rng).unwrap();
        let input = haar_state(3, &mut rng);
        let tables = correct_tables(table_count(3, t), 1);
        group.bench_with_input(BenchmarkId::new("n=3", format!("T={t}")), &circuit, |b, circ| {
            b.iter(|| {
                let mut pool = TablePool::new(tables.clone()).unwrap();
                run_scheme1(circ, &input, &mut pool, &mut stream_rng(2, 0)).unwrap()
            })
        });
    }
    group.finish();
}

criterion_group!(benches, scheme);
criterion_main!(benches);
