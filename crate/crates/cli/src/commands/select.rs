use covshift_core::experiments::prediction_error;
use covshift_core::{grid_search, predict, Candidate, EmConfig, GicReport, Method, SelectionResult};
use serde::Serialize;

use super::{emit, grid_from, methods_from, prepare, weights_for};
use crate::args::SelectArgs;
use crate::error::CliResult;
use crate::table::{fixed2, sig3, Table};

#[derive(Debug, Serialize)]
pub struct SelectedParams {
    pub gamma1: f64,
    pub gamma2: f64,
    pub log10_lambda: f64,
    pub lambda: f64,
}

#[derive(Debug, Serialize)]
pub struct MethodSelection {
    pub method: Method,
    pub selected: SelectedParams,
    pub gic: GicReport,
    pub converged: bool,
    pub best_is_nonconverged: bool,
    pub em_iterations: usize,
    pub coefficients: Vec<f64>,
    pub test_pe_percent: Option<f64>,
    pub candidates: Vec<Candidate>,
}

#[derive(Debug, Serialize)]
struct SelectOutput<'a> {
    command: &'static str,
    config: &'a SelectArgs,
    methods: Vec<Method>,
    grid: covshift_core::Grid,
    em: EmConfig,
    n_labeled: usize,
    n_unlabeled: usize,
    n_features: usize,
    results: Vec<MethodSelection>,
}

pub fn summarize(sel: SelectionResult, test_pe: Option<f64>) -> MethodSelection {
    let p = sel.best.params;
    MethodSelection {
        method: sel.method,
        selected: SelectedParams {
            gamma1: p.gamma1,
            gamma2: p.gamma2,
            log10_lambda: p.log10_lambda(),
            lambda: p.lambda,
        },
        gic: sel.best_report,
        converged: sel.best.converged,
        best_is_nonconverged: sel.best_is_nonconverged,
        em_iterations: sel.best.em_iterations,
        coefficients: sel.best.w.as_array().to_vec(),
        test_pe_percent: test_pe,
        candidates: sel.all_candidates,
    }
}

pub fn run(args: &SelectArgs) -> CliResult<()> {
    let methods = methods_from(&args.method);
    let grid = grid_from(&args.grid)?;
    let em = EmConfig::default();
    let prepared = prepare(&args.data, &methods, args.test.as_deref())?;
    let data = &prepared.data;
    let weights = weights_for(data, &methods, args.data.seed)?;

    let mut results = Vec::new();
    for &method in &methods {
        let sel = grid_search(data, &weights, &grid, method, &em)?;
        let pe = match data.test() {
            Some((tx, ty)) => {
                let pred = predict(&sel.best, tx)?;
                Some(prediction_error(
                    &pred.labels.to_vec(),
                    &ty.to_vec(),
                )?)
            }
            None => None,
        };
        results.push(summarize(sel, pe));
    }

    let table = render(&results);
    let output = SelectOutput {
        command: "select",
        config: args,
        methods,
        grid,
        em,
        n_labeled: data.n_labeled(),
        n_unlabeled: data.n_unlabeled(),
        n_features: data.n_features(),
        results,
    };
    emit(&args.out, &output, &table)
}

fn render(results: &[MethodSelection]) -> String {
    let mut t = Table::new(
        [
            "Method",
            "log10(lambda)",
            "gamma1",
            "gamma2",
            "GIC",
            "-2 wlogL",
            "2 tr(QR^-1)",
            "test PE (%)",
        ]
        .map(String::from)
        .to_vec(),
    );
    for r in results {
        t.push(vec![
            r.method.name().to_string(),
            fixed2(r.selected.log10_lambda),
            fixed2(r.selected.gamma1),
            fixed2(r.selected.gamma2),
            format!("{:.3}", r.gic.gic),
            format!("{:.3}", r.gic.weighted_nll),
            format!("{:.3}", 2.0 * r.gic.trace_term),
            r.test_pe_percent.map_or("-".into(), sig3),
        ]);
    }
    let mut text = t.render();
    if results.iter().any(|r| r.best_is_nonconverged) {
        text.push_str("note: no converged candidate for some methods; best non-converged fit shown\n");
    }
    text
}
