use std::fmt::Write as _;

use covshift_core::experiments::load_unlabeled_csv;
use covshift_core::{Error, ModelFile};

use crate::args::PredictArgs;
use crate::error::CliResult;

pub fn run(args: &PredictArgs) -> CliResult<()> {
    let model = ModelFile::load(&args.model)?;
    let x = load_unlabeled_csv(&args.input)?;
    if x.ncols() != model.n_features {
        return Err(Error::DimensionMismatch(format!(
            "{} has {} feature columns, model expects {}",
            args.input.display(),
            x.ncols(),
            model.n_features
        ))
        .into());
    }
    let pred = model.predict(x.view())?;
    let mut text = String::from("probability,label\n");
    for (p, l) in pred.probabilities.iter().zip(&pred.labels) {
        writeln!(text, "{p:?},{l}").expect("writing to a String");
    }
    match &args.output {
        Some(path) => std::fs::write(path, text).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?,
        None => print!("{text}"),
    }
    Ok(())
}
