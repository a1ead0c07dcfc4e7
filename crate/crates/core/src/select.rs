//! Exhaustive GIC-minimizing search over `(γ₁, γ₂, λ)`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use ndarray::Array1;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::SplitDataset;
use crate::em::{em_on, step1_on, EmConfig, FittedModel, PoweredWeights};
use crate::error::{Error, Result};
use crate::gic::{score_on, GicReport};
use crate::objective::{StackedDesign, TuningParams};
use crate::ratio::RatioWeights;

/// Which model family a search fits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Ratio-weighted semi-supervised fit; searches all three parameters.
    Sslrcs,
    /// Unweighted semi-supervised fit; searches `λ` only.
    Lsslr,
    /// Labeled-only ridge fit; searches `λ` only.
    Slr,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Sslrcs, Method::Lsslr, Method::Slr];

    pub fn name(self) -> &'static str {
        match self {
            Method::Sslrcs => "SSLRCS",
            Method::Lsslr => "LSSLR",
            Method::Slr => "SLR",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sslrcs" => Ok(Method::Sslrcs),
            "lsslr" => Ok(Method::Lsslr),
            "slr" => Ok(Method::Slr),
            other => Err(Error::InvalidParameter(format!(
                "unknown method '{other}', expected sslrcs, lsslr or slr"
            ))),
        }
    }
}

/// Candidate values for each tuning parameter; `λ = 10^v` for each `v`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub gamma1_values: Vec<f64>,
    pub gamma2_values: Vec<f64>,
    pub log10_lambda_values: Vec<f64>,
}

/// `start, start + step, …` up to and including `end` (within rounding).
pub fn linspace_step(start: f64, end: f64, step: f64) -> Vec<f64> {
    let n = ((end - start) / step + 1e-9).floor() as usize;
    (0..=n)
        .map(|i| {
            let v = start + step * i as f64;
            // snap to 10 decimals so grid values print and compare cleanly
            (v * 1e10).round() / 1e10
        })
        .collect()
}

impl Default for Grid {
    fn default() -> Self {
        Self {
            gamma1_values: linspace_step(0.0, 1.0, 0.1),
            gamma2_values: linspace_step(0.0, 1.0, 0.1),
            log10_lambda_values: linspace_step(-4.0, 2.5, 0.5),
        }
    }
}

impl Grid {
    pub fn new(
        gamma1_values: Vec<f64>,
        gamma2_values: Vec<f64>,
        log10_lambda_values: Vec<f64>,
    ) -> Result<Self> {
        let g = Self {
            gamma1_values,
            gamma2_values,
            log10_lambda_values,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if self.gamma1_values.is_empty()
            || self.gamma2_values.is_empty()
            || self.log10_lambda_values.is_empty()
        {
            return Err(Error::InvalidParameter("grid axes must be non-empty".into()));
        }
        for g in self.gamma1_values.iter().chain(&self.gamma2_values) {
            if !(0.0..=1.0).contains(g) {
                return Err(Error::InvalidParameter(format!(
                    "grid gamma {g} outside [0, 1]"
                )));
            }
        }
        for v in &self.log10_lambda_values {
            let lambda = 10f64.powf(*v);
            if !(lambda > 0.0 && lambda.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "log10 lambda {v} does not give a positive finite lambda"
                )));
            }
        }
        Ok(())
    }

    pub fn lambdas(&self) -> Vec<f64> {
        self.log10_lambda_values
            .iter()
            .map(|v| 10f64.powf(*v))
            .collect()
    }

    /// Number of fits a search with `method` performs.
    pub fn candidate_count(&self, method: Method) -> usize {
        match method {
            Method::Sslrcs => {
                self.gamma1_values.len() * self.gamma2_values.len() * self.log10_lambda_values.len()
            }
            Method::Lsslr | Method::Slr => self.log10_lambda_values.len(),
        }
    }
}

/// One scored grid point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub params: TuningParams,
    pub report: Option<GicReport>,
    pub converged: bool,
    pub em_iterations: usize,
    pub error: Option<String>,
}

impl Candidate {
    fn usable_gic(&self) -> Option<f64> {
        self.report.map(|r| r.gic).filter(|g| g.is_finite())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionResult {
    pub method: Method,
    pub best: FittedModel,
    pub best_report: GicReport,
    /// True when no converged candidate was available and the best
    /// non-converged one was taken.
    pub best_is_nonconverged: bool,
    pub all_candidates: Vec<Candidate>,
}

/// Ordering used for the argmin: converged first, then GIC, then smallest
/// `λ`, `γ₁`, `γ₂`.
fn candidate_order(a: &Candidate, b: &Candidate) -> Ordering {
    let ga = a.usable_gic().expect("filtered");
    let gb = b.usable_gic().expect("filtered");
    b.converged
        .cmp(&a.converged)
        .then(ga.total_cmp(&gb))
        .then(a.params.lambda.total_cmp(&b.params.lambda))
        .then(a.params.gamma1.total_cmp(&b.params.gamma1))
        .then(a.params.gamma2.total_cmp(&b.params.gamma2))
}

/// Fit one model of `method` at `params`.
pub fn fit_method(
    data: &SplitDataset,
    weights: &RatioWeights,
    method: Method,
    params: &TuningParams,
    config: &EmConfig,
) -> Result<FittedModel> {
    config.validate()?;
    weights.check_against(data)?;
    let (design, powered, params) = method_inputs(data, weights, method, params);
    let step1 = step1_on(&design, &powered.labeled, params.lambda, &config.newton)?;
    em_on(&design, &powered, &params, step1, config)
}

fn method_inputs(
    data: &SplitDataset,
    weights: &RatioWeights,
    method: Method,
    params: &TuningParams,
) -> (StackedDesign, PoweredWeights, TuningParams) {
    match method {
        Method::Sslrcs => (
            StackedDesign::new(data),
            PoweredWeights::new(weights, params),
            *params,
        ),
        Method::Lsslr => (
            StackedDesign::new(data),
            PoweredWeights {
                labeled: Array1::ones(data.n_labeled()),
                unlabeled: Array1::ones(data.n_unlabeled()),
            },
            TuningParams { gamma1: 0.0, gamma2: 0.0, ..*params },
        ),
        Method::Slr => (
            StackedDesign::new(&data.labeled_only()),
            PoweredWeights {
                labeled: Array1::ones(data.n_labeled()),
                unlabeled: Array1::zeros(0),
            },
            TuningParams { gamma1: 0.0, gamma2: 0.0, ..*params },
        ),
    }
}

fn score_candidate(
    design: &StackedDesign,
    powered: &PoweredWeights,
    params: TuningParams,
    step1: &Result<(Array1<f64>, bool)>,
    config: &EmConfig,
) -> Candidate {
    let outcome = match step1 {
        Ok(s) => em_on(design, powered, &params, s.clone(), config).and_then(|fit| {
            let report = score_on(
                design.labeled_rows(),
                design.labeled_targets(),
                fit.w.as_array(),
                &powered.labeled,
                &params,
            )?;
            Ok((fit, report))
        }),
        Err(e) => Err(Error::InvalidParameter(format!("step 1 failed: {e}"))),
    };
    match outcome {
        Ok((fit, report)) => Candidate {
            params,
            report: Some(report),
            converged: fit.converged,
            em_iterations: fit.em_iterations,
            error: None,
        },
        Err(e) => Candidate {
            params,
            report: None,
            converged: false,
            em_iterations: 0,
            error: Some(e.to_string()),
        },
    }
}

/// Fit and score every grid point for `method` and return the GIC minimizer.
///
/// For LSSLR the `γ` axes are ignored and all ratios are 1; for SLR the
/// unlabeled rows are dropped as well. Candidates are enumerated in
/// `γ₁, λ, γ₂` order and may be fitted concurrently; the result does not
/// depend on enumeration order.
pub fn grid_search(
    data: &SplitDataset,
    weights: &RatioWeights,
    grid: &Grid,
    method: Method,
    config: &EmConfig,
) -> Result<SelectionResult> {
    grid.validate()?;
    config.validate()?;
    weights.check_against(data)?;

    let lambdas = grid.lambdas();
    let (gamma1s, gamma2s) = match method {
        Method::Sslrcs => (grid.gamma1_values.clone(), grid.gamma2_values.clone()),
        Method::Lsslr | Method::Slr => (vec![0.0], vec![0.0]),
    };
    let base = TuningParams {
        gamma1: 0.0,
        gamma2: 0.0,
        lambda: 1.0,
    };
    let (design, unit_powered, _) = method_inputs(data, weights, method, &base);

    let outer: Vec<(f64, f64)> = gamma1s
        .iter()
        .flat_map(|&g1| lambdas.iter().map(move |&l| (g1, l)))
        .collect();

    let candidates: Vec<Candidate> = outer
        .par_iter()
        .flat_map_iter(|&(gamma1, lambda)| {
            let labeled = match method {
                Method::Sslrcs => weights.powered_labeled(gamma1),
                _ => unit_powered.labeled.clone(),
            };
            let step1 = step1_on(&design, &labeled, lambda, &config.newton);
            gamma2s
                .iter()
                .map(|&gamma2| {
                    let unlabeled = match method {
                        Method::Sslrcs => weights.powered_unlabeled(gamma2),
                        _ => unit_powered.unlabeled.clone(),
                    };
                    let powered = PoweredWeights {
                        labeled: labeled.clone(),
                        unlabeled,
                    };
                    let params = TuningParams {
                        gamma1,
                        gamma2,
                        lambda,
                    };
                    score_candidate(&design, &powered, params, &step1, config)
                })
                .collect::<Vec<_>>()
        })
        .collect();

    let best = candidates
        .iter()
        .filter(|c| c.usable_gic().is_some())
        .min_by(|a, b| candidate_order(a, b))
        .cloned();
    let Some(best) = best else {
        let details = candidates
            .iter()
            .filter_map(|c| {
                c.error.as_ref().map(|e| {
                    format!(
                        "(g1={}, g2={}, log10 lambda={:.2}): {e}",
                        c.params.gamma1,
                        c.params.gamma2,
                        c.params.log10_lambda()
                    )
                })
            })
            .take(5)
            .collect::<Vec<_>>()
            .join("; ");
        return Err(Error::AllCandidatesFailed {
            count: candidates.len(),
            details,
        });
    };

    // candidates keep only scores; refit the winner (fits are deterministic)
    let model = fit_method(data, weights, method, &best.params, config)?;
    let best_report = best.report.expect("usable candidate has a report");
    Ok(SelectionResult {
        method,
        best: model,
        best_report,
        best_is_nonconverged: !best.converged,
        all_candidates: candidates,
    })
}
