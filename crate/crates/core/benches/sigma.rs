use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use casq_core::casci::SigmaEngine;
use casq_core::detspace::CasSpace;
use casq_core::ingest::random_integrals;

fn bench_sigma(c: &mut Criterion) {
    let mut group = c.benchmark_group("sigma");
    group.sample_size(10);
    for &(n_elec, n_orb) in &[(8usize, 10usize), (11, 12)] {
        let space = CasSpace::new(n_elec, n_orb, n_elec as i32 % 2).expect("valid space");
        let ints = random_integrals(n_orb, 7);
        let engine = SigmaEngine::new(&space, &ints);
        let x: Vec<f64> = (0..space.len())
            .map(|k| ((k * 37 % 101) as f64 - 50.0) / 50.0)
            .collect();
        let mut y = vec![0.0; space.len()];
        let tag = format!("cas({n_elec},{n_orb})/{}", space.len());
        group.bench_with_input(BenchmarkId::new("parallel", &tag), &x, |b, x| {
            b.iter(|| engine.apply(black_box(x), &mut y, true))
        });
        group.bench_with_input(BenchmarkId::new("sequential", &tag), &x, |b, x| {
            b.iter(|| engine.apply(black_box(x), &mut y, false))
        });
    }
    group.finish();
}

criterion_group!(benches, bench_sigma);
criterion_main!(benches);
