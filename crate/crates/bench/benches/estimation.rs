use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use diffsel_core::regression::{fit_least_squares, make_drift_responses};
use diffsel_core::selection::select_model;
use diffsel_core::{
    estimate_both, simulate_path, DiffusionFamily, DyadicModel, FamilyTag, PenaltySpec, Window,
};

fn bench_estimation(c: &mut Criterion) {
    let fam = DiffusionFamily::new(FamilyTag::Family1, 6.0, 2.0).unwrap();
    let (xi, _) = simulate_path(&fam, 5000, 0.05, 1).unwrap();
    let data = make_drift_responses(&xi);
    let spec = PenaltySpec::practical(5000, 0.05);
    let window = Window::new(-1.0, 1.0).unwrap();

    let mut fits = c.benchmark_group("fit_least_squares");
    for (p, r) in [(0u32, 1usize), (2, 4), (3, 9)] {
        let m = DyadicModel::new(p, r).unwrap();
        fits.bench_with_input(
            BenchmarkId::from_parameter(format!("p{p}_r{r}")),
            &m,
            |b, &m| b.iter(|| fit_least_squares(black_box(&data), m, window).unwrap()),
        );
    }
    fits.finish();

    c.bench_function("select_model_n5000", |b| {
        b.iter(|| select_model(black_box(&data), &spec, window).unwrap())
    });
    c.bench_function("estimate_both_n5000", |b| {
        b.iter(|| estimate_both(black_box(&xi), &spec).unwrap())
    });
}

criterion_group!(benches, bench_estimation);
criterion_main!(benches);
