use covshift_core::select::fit_method;
use covshift_core::{grid_search, ClipBounds, EmConfig, Method, ModelFile, TuningParams};
use serde::Serialize;

use super::{emit, grid_from, methods_from, prepare, weights_for};
use crate::args::FitArgs;
use crate::error::{CliError, CliResult};
use crate::table::{fixed2, Table};

#[derive(Debug, Serialize)]
struct FitOutput<'a> {
    command: &'static str,
    config: &'a FitArgs,
    selected_by_grid: bool,
    model: &'a ModelFile,
    gic: Option<f64>,
    converged: bool,
    em_iterations: usize,
}

pub fn run(args: &FitArgs) -> CliResult<()> {
    let methods = methods_from(&[args.method]);
    let [method] = methods.as_slice() else {
        return Err(CliError::Usage("fit takes exactly one method".into()));
    };
    let method = *method;
    let fixed = match (args.gamma1, args.gamma2, args.log10_lambda) {
        (None, None, None) => None,
        (g1, g2, Some(l)) if method != Method::Sslrcs || (g1.is_some() && g2.is_some()) => Some(
            TuningParams::new(g1.unwrap_or(0.0), g2.unwrap_or(0.0), 10f64.powf(l))
                .map_err(|e| CliError::Usage(e.to_string()))?,
        ),
        _ => {
            return Err(CliError::Usage(
                "give --gamma1, --gamma2 and --log10-lambda together, or none to search the grid"
                    .into(),
            ))
        }
    };
    let em = EmConfig::default();
    let prepared = prepare(&args.data, &methods, None)?;
    let data = &prepared.data;
    let weights = weights_for(data, &methods, args.data.seed)?;

    let (model, gic) = match fixed {
        Some(params) => (fit_method(data, &weights, method, &params, &em)?, None),
        None => {
            let grid = grid_from(&args.grid)?;
            let sel = grid_search(data, &weights, &grid, method, &em)?;
            (sel.best, Some(sel.best_report.gic))
        }
    };
    let file = ModelFile::from_fit(&model, method, ClipBounds::default())
        .with_scaling(prepared.scaling.clone());
    file.save(&args.model)?;

    let mut t = Table::new(
        ["Method", "log10(lambda)", "gamma1", "gamma2", "coefficients"]
            .map(String::from)
            .to_vec(),
    );
    let coefs: Vec<String> = model.w.as_array().iter().map(|v| format!("{v:.4}")).collect();
    t.push(vec![
        method.name().into(),
        fixed2(model.params.log10_lambda()),
        fixed2(model.params.gamma1),
        fixed2(model.params.gamma2),
        coefs.join(" "),
    ]);
    let mut table = t.render();
    table.push_str(&format!("model written to {}\n", args.model.display()));
    let output = FitOutput {
        command: "fit",
        config: args,
        selected_by_grid: fixed.is_none(),
        model: &file,
        gic,
        converged: model.converged,
        em_iterations: model.em_iterations,
    };
    emit(&args.out, &output, &table)
}
