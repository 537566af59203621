use std::hint::black_box;

use a2g_los::geosim::{estimate_curve, is_blocked, synthesize_grid, Point3, SimConfig};
use a2g_los::ScenarioPreset;
use criterion::{criterion_group, criterion_main, Criterion};

fn tracing(c: &mut Criterion) {
    let grid = synthesize_grid(&ScenarioPreset::DenseUrban.scenario(), 3000.0, 1).unwrap();
    let tx = Point3::new(0.5, 0.5, 300.0);
    let rx = Point3::new(900.0, 700.0, 1.5);
    c.bench_function("segment trace, 1.1 km dense urban", |b| {
        b.iter(|| is_blocked(black_box(&grid), black_box(tx), black_box(rx)))
    });
}

fn monte_carlo(c: &mut Criterion) {
    let mut group = c.benchmark_group("monte carlo");
    group.sample_size(10);
    for preset in [ScenarioPreset::Suburban, ScenarioPreset::HighRiseUrban] {
        let mut cfg = SimConfig::new(preset.scenario(), 30.0, 2.0, vec![100.0, 300.0, 500.0]);
        cfg.trials_per_distance = 10_000;
        group.bench_function(format!("{}, 3 distances x 10k trials", preset.key()), |b| {
            b.iter(|| estimate_curve(black_box(&cfg)).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, tracing, monte_carlo);
criterion_main!(benches);
