use covshift_bench::{sim1_problem, sim2_data};
use covshift_core::experiments::{run_trials, Experiment, TrialSettings};
use covshift_core::{
    fit_semisupervised, gic_score, grid_search, weights_from_ulsif, EmConfig, Grid, Method,
    RngSeed, TuningParams, UlsifConfig,
};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

fn em_fit(c: &mut Criterion) {
    let mut group = c.benchmark_group("em_fit");
    let params = TuningParams::new(0.5, 0.5, 1e-2).unwrap();
    let config = EmConfig::default();
    for n in [25, 250] {
        let (data, weights) = sim1_problem(n, 1);
        group.bench_with_input(BenchmarkId::new("sim1", n), &n, |b, _| {
            b.iter(|| fit_semisupervised(black_box(&data), &weights, &params, &config).unwrap())
        });
    }
    group.finish();
}

fn gic(c: &mut Criterion) {
    let (data, weights) = sim1_problem(250, 2);
    let params = TuningParams::new(1.0, 0.0, 1e-2).unwrap();
    let model = fit_semisupervised(&data, &weights, &params, &EmConfig::default()).unwrap();
    c.bench_function("gic_score/sim1_250", |b| {
        b.iter(|| gic_score(black_box(&model), &data, &weights).unwrap())
    });
}

fn selection(c: &mut Criterion) {
    let mut group = c.benchmark_group("grid_search");
    group.sample_size(10);
    let (data, weights) = sim1_problem(100, 3);
    let grid = Grid::default();
    let config = EmConfig::default();
    for method in Method::ALL {
        group.bench_function(method.name(), |b| {
            b.iter(|| grid_search(black_box(&data), &weights, &grid, method, &config).unwrap())
        });
    }
    group.finish();
}

fn ulsif(c: &mut Criterion) {
    let mut group = c.benchmark_group("ulsif_weights");
    group.sample_size(10);
    let config = UlsifConfig::default();
    for case in [1u8, 2] {
        let data = sim2_data(case, 4);
        group.bench_with_input(BenchmarkId::new("sim2_case", case), &case, |b, _| {
            b.iter(|| weights_from_ulsif(black_box(&data), &config, RngSeed(5)).unwrap())
        });
    }
    group.finish();
}

fn trial(c: &mut Criterion) {
    let mut group = c.benchmark_group("single_trial");
    group.sample_size(10);
    let settings = TrialSettings::default();
    let experiment = Experiment::Sim1 { n_labeled: 50 };
    group.bench_function("sim1_50_all_methods", |b| {
        b.iter(|| run_trials(&experiment, &Method::ALL, 1, 0, &settings).unwrap())
    });
    group.finish();
}

criterion_group!(benches, em_fit, gic, selection, ulsif, trial);
criterion_main!(benches);
