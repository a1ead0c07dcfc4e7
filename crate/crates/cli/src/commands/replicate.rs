use std::path::PathBuf;
use std::sync::Arc;

use covshift_core::experiments::{
    load_benchmark, run_trials, synthetic_g10_like, BenchmarkData, BenchmarkExperiment,
    BenchmarkName, Experiment, Sim2Case, TrialReport, TrialSettings,
};
use covshift_core::{Method, RngSeed};
use serde::Serialize;

use super::{emit, grid_from, methods_from};
use crate::args::{DatasetArg, ReplicateArgs, Study};
use crate::error::{CliError, CliResult};
use crate::grid_spec::parse_counts;
use crate::table::{fixed2, sig3, Table};

/// One table block: a row label (dataset name or empty) and its settings.
#[derive(Debug, Serialize)]
pub struct Block {
    pub label: String,
    pub warnings: Vec<String>,
    pub columns: Vec<String>,
    pub reports: Vec<TrialReport>,
}

#[derive(Debug, Serialize)]
struct ReplicateOutput<'a> {
    command: &'static str,
    config: &'a ReplicateArgs,
    methods: Vec<Method>,
    blocks: Vec<Block>,
}

fn dataset_name(d: DatasetArg) -> BenchmarkName {
    match d {
        DatasetArg::G10 => BenchmarkName::G10,
        DatasetArg::Ionosphere => BenchmarkName::Ionosphere,
        DatasetArg::Pima => BenchmarkName::Pima,
    }
}

fn usage(flag: &str) -> impl Fn(String) -> CliError + '_ {
    move |e| CliError::Usage(format!("--{flag}: {e}"))
}

pub fn run(args: &ReplicateArgs) -> CliResult<()> {
    if args.trials == 0 {
        return Err(CliError::Usage("--trials must be positive".into()));
    }
    let methods = methods_from(&args.method);
    let settings = TrialSettings {
        grid: grid_from(&args.grid)?,
        ..TrialSettings::default()
    };
    let run = |e: &Experiment| run_trials(e, &methods, args.trials, args.seed, &settings);

    let blocks = match args.study {
        Study::Sim1 => {
            let ns = parse_counts(&args.n).map_err(usage("n"))?;
            let reports = ns
                .iter()
                .map(|&n| run(&Experiment::Sim1 { n_labeled: n }))
                .collect::<Result<Vec<_>, _>>()?;
            vec![Block {
                label: String::new(),
                warnings: Vec::new(),
                columns: ns.iter().map(ToString::to_string).collect(),
                reports,
            }]
        }
        Study::Sim2 => {
            let cases = parse_counts(&args.case).map_err(usage("case"))?;
            let cases = cases
                .iter()
                .map(|&c| {
                    u8::try_from(c)
                        .ok()
                        .and_then(|c| Sim2Case::from_index(c).ok())
                        .ok_or_else(|| CliError::Usage(format!("--case: no case {c}")))
                })
                .collect::<Result<Vec<_>, _>>()?;
            let reports = cases
                .iter()
                .map(|&case| run(&Experiment::Sim2 { case }))
                .collect::<Result<Vec<_>, _>>()?;
            vec![Block {
                label: String::new(),
                warnings: Vec::new(),
                columns: cases.iter().map(|c| format!("Case {}", c.index())).collect(),
                reports,
            }]
        }
        Study::Bench => bench_blocks(args, &run)?,
    };

    let table = render(args.study, &methods, &blocks);
    let output = ReplicateOutput {
        command: "replicate",
        config: args,
        methods,
        blocks,
    };
    emit(&args.out, &output, &table)
}

fn bench_blocks(
    args: &ReplicateArgs,
    run: &dyn Fn(&Experiment) -> covshift_core::Result<TrialReport>,
) -> CliResult<Vec<Block>> {
    let percents = parse_counts(&args.percent).map_err(usage("percent"))?;
    if let Some(p) = percents.iter().find(|&&p| p > 100) {
        return Err(CliError::Usage(format!("--percent: {p} exceeds 100")));
    }
    let mut sources: Vec<(String, BenchmarkData)> = Vec::new();
    if args.synthetic {
        sources.push((
            "g10-like (synthetic)".into(),
            synthetic_g10_like(RngSeed(args.seed).derive(7)),
        ));
    } else {
        let dir: PathBuf = args.data_dir.clone().ok_or_else(|| {
            CliError::Usage(format!(
                "bench needs --data-dir (or {}) unless --synthetic is given",
                crate::args::DATA_DIR_ENV
            ))
        })?;
        for &d in &args.dataset {
            let name = dataset_name(d);
            sources.push((name.to_string(), load_benchmark(name, &dir, args.strict)?));
        }
    }

    let mut blocks = Vec::new();
    for (label, data) in sources {
        let data = if args.standardize { data.standardized() } else { data };
        let warnings = data.warnings.clone();
        let data = Arc::new(data);
        let reports = percents
            .iter()
            .map(|&p| {
                run(&Experiment::Benchmark(BenchmarkExperiment {
                    label: label.clone(),
                    data: Arc::clone(&data),
                    labeled_fraction: p as f64 / 100.0,
                    selection_bias: args.selection_bias,
                }))
            })
            .collect::<Result<Vec<_>, _>>()?;
        blocks.push(Block {
            label,
            warnings,
            columns: percents.iter().map(ToString::to_string).collect(),
            reports,
        });
    }
    Ok(blocks)
}

fn render(study: Study, methods: &[Method], blocks: &[Block]) -> String {
    let corner = match study {
        Study::Sim1 => "Method \\ # of labeled data",
        Study::Sim2 => "Method \\ Data sets",
        Study::Bench => "Method \\ %",
    };
    let mut out = String::new();
    for block in blocks {
        let mut header = vec![corner.to_string(), String::new()];
        header.extend(block.columns.iter().cloned());
        let mut t = Table::new(header);
        if !block.label.is_empty() {
            t.push(vec![block.label.clone()]);
        }
        for &m in methods {
            let summaries: Vec<_> = block.reports.iter().map(|r| r.summary(m)).collect();
            let row = |name: &str, f: &dyn Fn(&covshift_core::experiments::TrialSummary) -> String| {
                let mut cells = vec![String::new(), name.to_string()];
                cells.extend(summaries.iter().map(|s| s.map_or("-".into(), f)));
                cells
            };
            let mut pe = row("PE", &|s| sig3(s.mean_pe_percent));
            pe[0] = m.name().to_string();
            t.push(pe);
            t.push(row("log10(lambda)", &|s| fixed2(s.mean_log10_lambda)));
            if m == Method::Sslrcs {
                t.push(row("gamma1", &|s| fixed2(s.mean_gamma1)));
                t.push(row("gamma2", &|s| fixed2(s.mean_gamma2)));
            }
            if summaries.iter().flatten().any(|s| s.n_failed > 0) {
                t.push(row("failed trials", &|s| s.n_failed.to_string()));
            }
        }
        out.push_str(&t.render());
        for w in &block.warnings {
            out.push_str(&format!("warning: {w}\n"));
        }
        out.push('\n');
    }
    let trials = blocks
        .first()
        .and_then(|b| b.reports.first())
        .map_or(0, |r| r.n_trials);
    out.push_str(&format!("means over {trials} trials per setting\n"));
    out
}
