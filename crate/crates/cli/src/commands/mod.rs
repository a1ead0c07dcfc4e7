pub mod fit;
pub mod predict;
pub mod replicate;
pub mod select;

use std::path::Path;

use covshift_core::experiments::{load_labeled_csv, load_unlabeled_csv};
use covshift_core::{
    weights_from_ulsif, FeatureScaling, Grid, Method, RatioWeights, RngSeed, SplitDataset,
    UlsifConfig,
};
use ndarray::{concatenate, Array2, Axis};
use serde::Serialize;

use crate::args::{DataArgs, GridArgs, MethodArg, OutputArgs};
use crate::error::{CliError, CliResult};
use crate::grid_spec::parse_values;

pub fn methods_from(args: &[MethodArg]) -> Vec<Method> {
    let mut out = Vec::new();
    for a in args {
        let ms: &[Method] = match a {
            MethodArg::All => &Method::ALL,
            MethodArg::Sslrcs => &[Method::Sslrcs],
            MethodArg::Lsslr => &[Method::Lsslr],
            MethodArg::Slr => &[Method::Slr],
        };
        for m in ms {
            if !out.contains(m) {
                out.push(*m);
            }
        }
    }
    out.sort();
    out
}

pub fn grid_from(args: &GridArgs) -> CliResult<Grid> {
    let axis = |name: &str, spec: &str| {
        parse_values(spec).map_err(|e| CliError::Usage(format!("--{name}: {e}")))
    };
    Grid::new(
        axis("grid-gamma1", &args.grid_gamma1)?,
        axis("grid-gamma2", &args.grid_gamma2)?,
        axis("grid-log10-lambda", &args.grid_log10_lambda)?,
    )
    .map_err(|e| CliError::Usage(e.to_string()))
}

/// Labeled/unlabeled (and optional test) data as the model sees it.
pub struct Prepared {
    pub data: SplitDataset,
    pub scaling: Option<FeatureScaling>,
}

/// Load the input files. Unlabeled rows are read only when a method uses them.
pub fn prepare(args: &DataArgs, methods: &[Method], test: Option<&Path>) -> CliResult<Prepared> {
    let uses_unlabeled = methods.iter().any(|m| *m != Method::Slr);
    let (lx, ly) = load_labeled_csv(&args.labeled)?;
    let ux = if uses_unlabeled {
        let path = args.unlabeled.as_ref().ok_or_else(|| {
            CliError::Usage("--unlabeled is required for sslrcs and lsslr".into())
        })?;
        load_unlabeled_csv(path)?
    } else {
        Array2::zeros((0, lx.ncols()))
    };
    let scaling = if args.standardize {
        let pooled = concatenate(Axis(0), &[lx.view(), ux.view()]).map_err(|_| {
            covshift_core::Error::DimensionMismatch(format!(
                "labeled data has {} features, unlabeled data has {}",
                lx.ncols(),
                ux.ncols()
            ))
        })?;
        Some(FeatureScaling::fit(pooled.view())?)
    } else {
        None
    };
    let scale = |x: Array2<f64>| -> CliResult<Array2<f64>> {
        match &scaling {
            Some(s) => Ok(s.apply(x.view())?),
            None => Ok(x),
        }
    };
    let mut data = SplitDataset::new(scale(lx)?, ly, scale(ux)?)?;
    if let Some(path) = test {
        let (tx, ty) = load_labeled_csv(path)?;
        data = data.with_test(scale(tx)?, ty)?;
    }
    Ok(Prepared { data, scaling })
}

/// uLSIF ratios when a covariate-shift fit is requested, unit weights otherwise.
pub fn weights_for(data: &SplitDataset, methods: &[Method], seed: u64) -> CliResult<RatioWeights> {
    if methods.contains(&Method::Sslrcs) {
        Ok(weights_from_ulsif(
            data,
            &UlsifConfig::default(),
            RngSeed(seed).derive(100),
        )?)
    } else {
        Ok(RatioWeights::ones_for(data))
    }
}

/// Write `value` as pretty JSON to `--output` and/or stdout; otherwise print `table`.
pub fn emit<T: Serialize>(out: &OutputArgs, value: &T, table: &str) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| covshift_core::Error::Schema(e.to_string()))?;
    text.push('\n');
    if let Some(path) = &out.output {
        std::fs::write(path, &text).map_err(|source| covshift_core::Error::Io {
            path: path.display().to_string(),
            source,
        })?;
    }
    if out.json {
        print!("{text}");
    } else {
        print!("{table}");
    }
    Ok(())
}
