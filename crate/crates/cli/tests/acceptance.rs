//! Acceptance suite. Prints one `PASS`/`FAIL` line per criterion.
//!
//! Exact and property criteria (1-4, 8, 9) are asserted. The Monte Carlo
//! replication criteria (5-7) always print their verdict and numbers; they
//! fail the test run only when `ACCEPTANCE_STRICT=1` is set.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::io::Write;
use std::path::PathBuf;
use std::process::Command;
use std::sync::Arc;

use common::*;
use covshift_core::experiments::{
    gen_sim1, load_benchmark, run_trials, synthetic_g10_like, BenchmarkExperiment, BenchmarkName,
    Experiment, Sim1Config, Sim2Case, TrialReport, TrialSettings,
};
use covshift_core::ratio::median_distance;
use covshift_core::select::fit_method;
use covshift_core::*;
use nalgebra::DMatrix;
use ndarray::Array2;

const TRIALS: usize = 50;

struct Verdict {
    id: u8,
    pass: bool,
    asserted: bool,
}

/// Writes straight to the process stdout so the lines survive output capture.
fn report(id: u8, title: &str, pass: bool, detail: &str) {
    let tag = if pass { "PASS" } else { "FAIL" };
    let mut out = std::io::stdout().lock();
    writeln!(out, "acceptance {id}: {tag}  {title}").unwrap();
    for line in detail.lines() {
        writeln!(out, "    {line}").unwrap();
    }
    out.flush().unwrap();
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn mean_pe(report: &TrialReport, method: Method) -> f64 {
    report.summary(method).expect("method was run").mean_pe_percent
}

fn criterion_1() -> (bool, String) {
    let config = EmConfig::default();
    let mut worst = 0.0f64;
    let mut shape_ok = true;
    let mut cases: Vec<(SplitDataset, RatioWeights, f64)> = (0..60)
        .map(|seed| {
            let inst = random_instance(seed);
            (inst.data, inst.weights, inst.params.lambda)
        })
        .collect();
    let cfg = Sim1Config::new(50);
    let sim = gen_sim1(&cfg, RngSeed(11)).unwrap();
    let w = weights_from_exact(
        &cfg.label_density,
        &cfg.unlabel_density,
        &sim,
        ClipBounds::default(),
    )
    .unwrap();
    cases.push((sim, w, 1e-2));
    for (data, weights, lambda) in &cases {
        let zero = TuningParams::new(0.0, 0.0, *lambda).unwrap();
        let a = fit_method(data, weights, Method::Sslrcs, &zero, &config).unwrap();
        let b = fit_method(data, weights, Method::Lsslr, &zero, &config).unwrap();
        shape_ok &= a.trajectory.len() == b.trajectory.len();
        for (x, y) in a.trajectory.iter().zip(&b.trajectory) {
            worst = worst.max(max_abs_diff(x.as_slice().unwrap(), y.as_slice().unwrap()));
        }
        worst = worst.max(max_abs_diff(
            a.w.as_array().as_slice().unwrap(),
            b.w.as_array().as_slice().unwrap(),
        ));
    }
    let pass = shape_ok && worst <= 1e-12;
    (
        pass,
        format!(
            "{} instances, trajectory lengths equal: {shape_ok}, max |diff| {worst:.1e} (tol 1e-12)",
            cases.len()
        ),
    )
}

fn criterion_2() -> (bool, String) {
    let mut worst_g = 0.0f64;
    let mut worst_h = 0.0f64;
    for seed in 0..200 {
        let inst = random_instance(seed);
        let w = Coefficients::new(inst.w.clone()).unwrap();
        let g = gradient(&w, &inst.data, &inst.weights, &inst.t, &inst.params).unwrap();
        let h = hessian(&w, &inst.data, &inst.weights, &inst.t, &inst.params).unwrap();
        let w0 = inst.w.to_vec();
        let fd_g = fd_gradient(|v| objective_oracle(&inst, v), &w0, 1e-5);
        let g_scale = fd_g.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let h_scale = h.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for b in 0..w0.len() {
            worst_g = worst_g.max(rel_err(g[b], fd_g[b], g_scale));
            let col = fd_gradient(|v| gradient_oracle(&inst, v)[b], &w0, 1e-5);
            for a in 0..w0.len() {
                worst_h = worst_h.max(rel_err(h[[a, b]], col[a], h_scale));
            }
        }
    }
    (
        worst_g < 1e-6 && worst_h < 1e-5,
        format!("200 instances, max relative error gradient {worst_g:.1e} (tol 1e-6), Hessian {worst_h:.1e} (tol 1e-5)"),
    )
}

fn criterion_3() -> (bool, String) {
    let mut worst = 0.0f64;
    let mut factorized = 0;
    for seed in 1000..1050 {
        let inst = random_instance(seed);
        let model =
            fit_semisupervised(&inst.data, &inst.weights, &inst.params, &EmConfig::default())
                .unwrap();
        let m = gic_matrices(&model, &inst.data, &inst.weights).unwrap();
        let (q, r) = psi_oracle(&inst, &model.w.as_array().to_vec());
        let (qs, rs) = (q.amax().max(1e-300), r.amax().max(1e-300));
        for a in 0..q.nrows() {
            for b in 0..q.ncols() {
                worst = worst.max((m.q[[a, b]] - q[(a, b)]).abs() / qs);
                worst = worst.max((m.r[[a, b]] - r[(a, b)]).abs() / rs);
            }
        }
        let rm = DMatrix::from_fn(r.nrows(), r.ncols(), |i, j| m.r[[i, j]]);
        if rm == rm.transpose() && rm.cholesky().is_some() {
            factorized += 1;
        }
    }
    (
        worst <= 1e-10 && factorized == 50,
        format!("50 instances, max relative error {worst:.1e} (tol 1e-10), R symmetric positive definite in {factorized}/50"),
    )
}

fn criterion_4() -> (bool, String) {
    let mut steps = 0usize;
    let mut decreases = 0usize;
    for seed in 0..200 {
        let inst = random_instance(seed);
        let (_, diag) = newton_maximize(
            &Coefficients::zeros(inst.data.n_features() + 1),
            &inst.data,
            &inst.weights,
            &inst.t,
            &inst.params,
            &NewtonConfig::default(),
        )
        .unwrap();
        for pair in diag.trace.windows(2) {
            steps += 1;
            if pair[1] < pair[0] - 1e-12 * pair[0].abs().max(1.0) {
                decreases += 1;
            }
        }
    }
    let mut step1_equal = 0;
    for seed in 0..50 {
        let inst = random_instance(seed);
        let data = inst.data.labeled_only();
        let weights =
            RatioWeights::new(inst.weights.r_labeled.clone(), ndarray::Array1::zeros(0)).unwrap();
        let config = EmConfig::default();
        let fit = fit_semisupervised(&data, &weights, &inst.params, &config).unwrap();
        let step1 = fit_step1(&data, &weights, &inst.params, &config).unwrap();
        if fit.w == step1 {
            step1_equal += 1;
        }
    }
    (
        decreases == 0 && step1_equal == 50,
        format!(
            "{steps} accepted M-step Newton steps over 200 instances, {decreases} decreases; \
             no-unlabeled fit identical to Step 1 in {step1_equal}/50"
        ),
    )
}

fn criterion_5() -> (bool, String) {
    let targets = [
        (Sim2Case::Case1, [1.28, 1.36, 1.43], 1.0),
        (Sim2Case::Case2, [3.65, 4.19, 5.05], 1.0),
        (Sim2Case::Case3, [9.72, 11.6, 11.7], 2.0),
    ];
    let settings = TrialSettings::default();
    let mut pass = true;
    let mut detail = String::new();
    for (case, target, tol) in targets {
        let report = run_trials(&Experiment::Sim2 { case }, &Method::ALL, TRIALS, 0, &settings)
            .unwrap();
        let pe = Method::ALL.map(|m| mean_pe(&report, m));
        let within: Vec<bool> = pe.iter().zip(target).map(|(a, t)| (a - t).abs() <= tol).collect();
        let ordered = pe[0] <= pe[1] && pe[0] <= pe[2];
        pass &= within.iter().all(|w| *w) && ordered;
        detail += &format!(
            "case {}: SSLRCS {:.2} / LSSLR {:.2} / SLR {:.2} vs {:?} (±{tol}): within {:?}, ordering {}\n",
            case.index(),
            pe[0],
            pe[1],
            pe[2],
            target,
            within,
            if ordered { "ok" } else { "violated" }
        );
    }
    (pass, detail)
}

fn criterion_6() -> (bool, String) {
    let ns = [25, 50, 100, 150, 200, 250];
    let targets = [33.3, 33.3, 33.9, 34.8, 35.5, 35.0];
    let settings = TrialSettings::default();
    let mut within_all = true;
    let mut ordered = 0;
    let mut detail = String::new();
    for (&n, &target) in ns.iter().zip(&targets) {
        let report = run_trials(
            &Experiment::Sim1 { n_labeled: n },
            &Method::ALL,
            TRIALS,
            0,
            &settings,
        )
        .unwrap();
        let pe = Method::ALL.map(|m| mean_pe(&report, m));
        let within = (pe[0] - target).abs() <= 3.0;
        let ok = pe[0] <= pe[1] && pe[0] <= pe[2];
        within_all &= within;
        ordered += usize::from(ok);
        detail += &format!(
            "n={n}: SSLRCS {:.2} (target {target} ±3: {}) / LSSLR {:.2} / SLR {:.2}, ordering {}\n",
            pe[0],
            if within { "ok" } else { "out" },
            pe[1],
            pe[2],
            if ok { "ok" } else { "violated" }
        );
    }
    detail += &format!("ordering holds in {ordered}/6 settings (need 5)");
    (within_all && ordered >= 5, detail)
}

fn pima_dir() -> Option<PathBuf> {
    let dir = PathBuf::from(std::env::var_os("COVSHIFT_DATA_DIR")?);
    let name = BenchmarkName::Pima;
    (name.train_file(&dir).is_file() && name.test_file(&dir).is_file()).then_some(dir)
}

fn criterion_7() -> (bool, String) {
    let settings = TrialSettings::default();
    let (experiment, mode) = match pima_dir() {
        Some(dir) => {
            let data = load_benchmark(BenchmarkName::Pima, &dir, true).unwrap();
            let exp = BenchmarkExperiment {
                label: "pima".into(),
                data: Arc::new(data),
                labeled_fraction: 0.05,
                selection_bias: None,
            };
            (exp, None)
        }
        None => {
            let exp = BenchmarkExperiment {
                label: "g10-like (synthetic)".into(),
                data: Arc::new(synthetic_g10_like(RngSeed(0).derive(7))),
                labeled_fraction: 0.05,
                selection_bias: Some(1.0),
            };
            (exp, Some("pima files unavailable: synthetic fallback (g10-shaped generator, 5% labeled, induced covariate shift of strength 1.0); property suite covered by criteria 1-4 and 8"))
        }
    };
    let report = run_trials(
        &Experiment::Benchmark(experiment),
        &Method::ALL,
        TRIALS,
        0,
        &settings,
    )
    .unwrap();
    let pe = Method::ALL.map(|m| mean_pe(&report, m));
    let ordered = pe[0] <= pe[1] && pe[0] <= pe[2];
    let mut detail = format!(
        "SSLRCS {:.2} / LSSLR {:.2} / SLR {:.2}, ordering {}\n",
        pe[0],
        pe[1],
        pe[2],
        if ordered { "ok" } else { "violated" }
    );
    let pass = match mode {
        Some(note) => {
            detail.insert_str(0, &format!("{note}\n"));
            ordered
        }
        None => {
            let within = (pe[0] - 26.6).abs() <= 2.0;
            detail += &format!("pima 300/232: SSLRCS target 26.6 ±2: {}", if within { "ok" } else { "out" });
            within && ordered
        }
    };
    (pass, detail)
}

fn ulsif_weights(num: &Array2<f64>, den: &Array2<f64>, points: &Array2<f64>) -> Vec<f64> {
    let med = median_distance(num.view(), den.view(), RngSeed(1));
    let sigmas: Vec<f64> = [0.1, 0.25, 0.5, 1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|f| f * med)
        .collect();
    let model =
        ulsif_fit(num.view(), den.view(), &sigmas, &[1e-3, 1e-2, 1e-1, 1.0], RngSeed(0)).unwrap();
    ulsif_predict(&model, points.view()).unwrap().to_vec()
}

fn criterion_8() -> (bool, String) {
    let x = draws(0.0, 500, 31);
    let same = ulsif_weights(&x, &x, &x);
    let inside = same.iter().filter(|w| (0.5..=2.0).contains(*w)).count();

    let num = draws(0.5, 500, 1);
    let den = draws(0.0, 500, 2);
    let grid: Vec<f64> = (0..=40).map(|i| -2.0 + 0.1 * f64::from(i)).collect();
    let gx = Array2::from_shape_vec((grid.len(), 1), grid.clone()).unwrap();
    let fitted = ulsif_weights(&num, &den, &gx);
    let exact: Vec<f64> = grid
        .iter()
        .map(|&v| normal_pdf(v, 0.5, 1.0) / normal_pdf(v, 0.0, 1.0))
        .collect();
    let r = pearson(&fitted, &exact);
    (
        inside * 100 >= 95 * 500 && r >= 0.9,
        format!(
            "identical samples: {inside}/500 ratios in [0.5, 2] (need 475); \
             N(0.5,1)/N(0,1) on [-2, 2]: Pearson {r:.4} (need 0.9)"
        ),
    )
}

fn replicate_json(args: &[&str]) -> Vec<u8> {
    let out = Command::new(env!("CARGO_BIN_EXE_covshift"))
        .args(args)
        .env_remove("COVSHIFT_DATA_DIR")
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    out.stdout
}

fn criterion_9() -> (bool, String) {
    let grid = [
        "--grid-gamma1",
        "0,0.5,1",
        "--grid-gamma2",
        "0,1",
        "--grid-log10-lambda",
        "-3:1:1",
    ];
    let runs: [&[&str]; 3] = [
        &["replicate", "sim1", "--n", "25,50", "--trials", "3", "--seed", "7", "--json"],
        &["replicate", "sim2", "--case", "1,3", "--trials", "2", "--seed", "7", "--json"],
        &[
            "replicate", "bench", "--synthetic", "--selection-bias", "1", "--percent", "5,20",
            "--trials", "2", "--seed", "7", "--json",
        ],
    ];
    let mut identical = 0;
    let mut detail = String::new();
    for base in runs {
        let mut args = base.to_vec();
        args.extend_from_slice(&grid);
        let (a, b) = (replicate_json(&args), replicate_json(&args));
        let same = a == b && !a.is_empty();
        identical += usize::from(same);
        detail += &format!("{} {}: {} bytes, identical {same}\n", args[0], args[1], a.len());
    }
    (identical == runs.len(), detail)
}

#[test]
fn acceptance_criteria() {
    let strict = std::env::var("ACCEPTANCE_STRICT").is_ok_and(|v| v == "1");
    type Check = fn() -> (bool, String);
    let criteria: [(u8, &str, Check, bool); 9] = [
        (1, "zero-exponent SSLRCS reproduces LSSLR exactly", criterion_1, true),
        (2, "gradient and Hessian match finite differences", criterion_2, true),
        (3, "GIC Q and R match per-sample summation", criterion_3, true),
        (4, "EM monotonicity and no-unlabeled reduction", criterion_4, true),
        (5, "Simulation 2 replication, 50 trials", criterion_5, false),
        (6, "Simulation 1 replication, 50 trials per n", criterion_6, false),
        (7, "benchmark protocol at 5% labeled", criterion_7, false),
        (8, "uLSIF sanity", criterion_8, true),
        (9, "replicate JSON is byte-identical across runs", criterion_9, true),
    ];
    writeln!(std::io::stdout().lock()).unwrap();
    let mut verdicts = Vec::new();
    for (id, title, check, asserted) in criteria {
        let (pass, detail) = check();
        report(id, title, pass, &detail);
        verdicts.push(Verdict {
            id,
            pass,
            asserted: asserted || strict,
        });
    }
    let failed: Vec<u8> = verdicts.iter().filter(|v| !v.pass).map(|v| v.id).collect();
    let fatal: Vec<u8> = verdicts
        .iter()
        .filter(|v| !v.pass && v.asserted)
        .map(|v| v.id)
        .collect();
    let mut out = std::io::stdout().lock();
    writeln!(
        out,
        "acceptance summary: {} of 9 passed; failed {failed:?}{}",
        9 - failed.len(),
        if strict { " (strict)" } else { "" }
    )
    .unwrap();
    drop(out);
    assert!(fatal.is_empty(), "acceptance criteria failed: {fatal:?}");
}
