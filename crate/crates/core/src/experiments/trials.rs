//! Monte Carlo driver: generate or split data, weight it, select each
//! method's tuning parameters by GIC, and score prediction error on the
//! held-out test set.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::benchmark::BenchmarkData;
use super::sim::{gen_sim1, gen_sim2, Sim1Config, Sim2Case, Sim2Config};
use crate::data::{RngSeed, SplitDataset};
use crate::em::{predict, EmConfig};
use crate::error::{Error, Result};
use crate::objective::TuningParams;
use crate::ratio::{weights_from_exact, weights_from_ulsif, ClipBounds, RatioWeights, UlsifConfig};
use crate::select::{grid_search, Grid, Method};

/// Percentage of mismatched labels.
pub fn prediction_error(predicted: &[u8], truth: &[u8]) -> Result<f64> {
    if predicted.len() != truth.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} predictions for {} labels",
            predicted.len(),
            truth.len()
        )));
    }
    if truth.is_empty() {
        return Err(Error::InvalidParameter("no labels to score".into()));
    }
    let wrong = predicted.iter().zip(truth).filter(|(a, b)| a != b).count();
    Ok(100.0 * wrong as f64 / truth.len() as f64)
}

/// A benchmark train/test split together with the labeled-fraction protocol.
#[derive(Debug, Clone)]
pub struct BenchmarkExperiment {
    pub label: String,
    pub data: Arc<BenchmarkData>,
    pub labeled_fraction: f64,
    /// When set, labeled rows are drawn with a covariate-dependent bias of
    /// this strength instead of uniformly (see [`BenchmarkData::biased_split`]).
    pub selection_bias: Option<f64>,
}

#[derive(Debug, Clone)]
pub enum Experiment {
    Sim1 { n_labeled: usize },
    Sim2 { case: Sim2Case },
    Benchmark(BenchmarkExperiment),
}

/// Serializable description of an [`Experiment`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ExperimentSpec {
    Sim1 {
        n_labeled: usize,
    },
    Sim2 {
        case: u8,
    },
    Benchmark {
        dataset: String,
        labeled_fraction: f64,
        selection_bias: Option<f64>,
    },
}

impl Experiment {
    pub fn spec(&self) -> ExperimentSpec {
        match self {
            Experiment::Sim1 { n_labeled } => ExperimentSpec::Sim1 {
                n_labeled: *n_labeled,
            },
            Experiment::Sim2 { case } => ExperimentSpec::Sim2 { case: case.index() },
            Experiment::Benchmark(b) => ExperimentSpec::Benchmark {
                dataset: b.label.clone(),
                labeled_fraction: b.labeled_fraction,
                selection_bias: b.selection_bias,
            },
        }
    }

    fn data_and_weights(
        &self,
        seed: RngSeed,
        settings: &TrialSettings,
    ) -> Result<(SplitDataset, RatioWeights)> {
        match self {
            Experiment::Sim1 { n_labeled } => {
                let cfg = Sim1Config::new(*n_labeled);
                let data = gen_sim1(&cfg, seed)?;
                let w = weights_from_exact(
                    &cfg.label_density,
                    &cfg.unlabel_density,
                    &data,
                    settings.exact_clip,
                )?;
                Ok((data, w))
            }
            Experiment::Sim2 { case } => {
                let data = gen_sim2(&Sim2Config::new(*case), seed)?;
                let w = weights_from_ulsif(&data, &settings.ulsif, seed.derive(100))?;
                Ok((data, w))
            }
            Experiment::Benchmark(b) => {
                let data = match b.selection_bias {
                    Some(strength) => b.data.biased_split(b.labeled_fraction, strength, seed)?,
                    None => b.data.split(b.labeled_fraction, seed)?,
                };
                let w = weights_from_ulsif(&data, &settings.ulsif, seed.derive(100))?;
                Ok((data, w))
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TrialSettings {
    pub grid: Grid,
    pub em: EmConfig,
    pub ulsif: UlsifConfig,
    /// Clipping for exactly computed ratios.
    pub exact_clip: ClipBounds,
}


#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodOutcome {
    pub method: Method,
    pub params: Option<TuningParams>,
    pub log10_lambda: Option<f64>,
    pub gic: Option<f64>,
    pub pe_percent: Option<f64>,
    pub converged: bool,
    pub error: Option<String>,
}

impl MethodOutcome {
    fn failed(method: Method, error: String) -> Self {
        Self {
            method,
            params: None,
            log10_lambda: None,
            gic: None,
            pe_percent: None,
            converged: false,
            error: Some(error),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub seed: u64,
    pub outcomes: Vec<MethodOutcome>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialSummary {
    pub method: Method,
    /// Completed trials the means are taken over.
    pub n_trials: usize,
    pub n_failed: usize,
    pub mean_pe_percent: f64,
    pub mean_log10_lambda: f64,
    pub mean_gamma1: f64,
    pub mean_gamma2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialReport {
    pub experiment: ExperimentSpec,
    pub methods: Vec<Method>,
    pub n_trials: usize,
    pub base_seed: u64,
    pub settings: TrialSettings,
    pub trials: Vec<TrialRecord>,
    pub summaries: Vec<TrialSummary>,
}

impl TrialReport {
    pub fn summary(&self, method: Method) -> Option<&TrialSummary> {
        self.summaries.iter().find(|s| s.method == method)
    }
}

fn run_method(
    data: &SplitDataset,
    weights: &RatioWeights,
    method: Method,
    settings: &TrialSettings,
) -> MethodOutcome {
    let outcome = grid_search(data, weights, &settings.grid, method, &settings.em).and_then(|sel| {
        let (test_x, test_y) = data
            .test()
            .ok_or_else(|| Error::InvalidParameter("experiment has no test set".into()))?;
        let pred = predict(&sel.best, test_x)?;
        let pe = prediction_error(
            pred.labels.as_slice().expect("contiguous"),
            test_y.as_slice().expect("contiguous"),
        )?;
        Ok((sel, pe))
    });
    match outcome {
        Ok((sel, pe)) => MethodOutcome {
            method,
            params: Some(sel.best.params),
            log10_lambda: Some(sel.best.params.log10_lambda()),
            gic: Some(sel.best_report.gic),
            pe_percent: Some(pe),
            converged: sel.best.converged,
            error: None,
        },
        Err(e) => MethodOutcome::failed(method, e.to_string()),
    }
}

fn run_one(
    experiment: &Experiment,
    methods: &[Method],
    trial: usize,
    seed: u64,
    settings: &TrialSettings,
) -> TrialRecord {
    let outcomes = match experiment.data_and_weights(RngSeed(seed), settings) {
        Ok((data, weights)) => methods
            .iter()
            .map(|&m| run_method(&data, &weights, m, settings))
            .collect(),
        Err(e) => methods
            .iter()
            .map(|&m| MethodOutcome::failed(m, format!("data preparation failed: {e}")))
            .collect(),
    };
    TrialRecord {
        trial,
        seed,
        outcomes,
    }
}

fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    if n == 0 {
        f64::NAN
    } else {
        sum / n as f64
    }
}

fn summarize(method: Method, trials: &[TrialRecord]) -> TrialSummary {
    let done: Vec<(&MethodOutcome, TuningParams, f64)> = trials
        .iter()
        .filter_map(|t| t.outcomes.iter().find(|o| o.method == method))
        .filter_map(|o| Some((o, o.params?, o.pe_percent?)))
        .collect();
    let n_failed = trials.len() - done.len();
    TrialSummary {
        method,
        n_trials: done.len(),
        n_failed,
        mean_pe_percent: mean(done.iter().map(|d| d.2)),
        mean_log10_lambda: mean(done.iter().map(|d| d.1.log10_lambda())),
        mean_gamma1: mean(done.iter().map(|d| d.1.gamma1)),
        mean_gamma2: mean(done.iter().map(|d| d.1.gamma2)),
    }
}

/// Run `n_trials` independent repetitions; trial `i` uses seed `base_seed + i`.
///
/// Simulation 1 uses exact density ratios; Simulation 2 and benchmarks
/// estimate them with uLSIF. Failed trials are recorded and excluded from
/// the means.
pub fn run_trials(
    experiment: &Experiment,
    methods: &[Method],
    n_trials: usize,
    base_seed: u64,
    settings: &TrialSettings,
) -> Result<TrialReport> {
    if n_trials == 0 {
        return Err(Error::InvalidParameter("n_trials must be positive".into()));
    }
    if methods.is_empty() {
        return Err(Error::InvalidParameter("at least one method is required".into()));
    }
    settings.grid.validate()?;
    settings.em.validate()?;
    if let Experiment::Benchmark(b) = experiment {
        crate::data::labeled_count(b.data.train_x.nrows(), b.labeled_fraction)?;
    }

    let trials: Vec<TrialRecord> = (0..n_trials)
        .into_par_iter()
        .map(|i| {
            run_one(
                experiment,
                methods,
                i,
                base_seed.wrapping_add(i as u64),
                settings,
            )
        })
        .collect();
    let summaries = methods.iter().map(|&m| summarize(m, &trials)).collect();
    Ok(TrialReport {
        experiment: experiment.spec(),
        methods: methods.to_vec(),
        n_trials,
        base_seed,
        settings: settings.clone(),
        trials,
        summaries,
    })
}
