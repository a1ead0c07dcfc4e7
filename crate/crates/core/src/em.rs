//! EM fitting of the weighted semi-supervised model.
//!
//! Step 1 fits the labeled terms alone. Each EM iteration then imputes soft
//! labels `t̂ = π(x; ŵ)` for the unlabeled rows (E-step) and re-maximizes the
//! full penalized objective with `t̂` fixed (M-step). Iteration stops once
//! two consecutive objective values differ by less than `epsilon`, where the
//! k-th value is the objective at `ŵ⁽ᵏ⁾` under the `t̂` used to produce it.
//! The starting value is the Step 1 estimate scored under the first `t̂`.

use ndarray::{Array1, ArrayView2};
use serde::{Deserialize, Serialize};

use crate::data::{design_rows, SplitDataset};
use crate::error::{Error, Result};
use crate::objective::{
    maximize, sigmoid, Coefficients, NewtonConfig, SoftLabels, StackedDesign, TuningParams,
    WeightedLikelihood,
};
use crate::ratio::RatioWeights;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmConfig {
    pub epsilon: f64,
    pub max_em_iters: usize,
    pub newton: NewtonConfig,
}

impl Default for EmConfig {
    fn default() -> Self {
        Self {
            epsilon: 1e-5,
            max_em_iters: 500,
            newton: NewtonConfig::default(),
        }
    }
}

impl EmConfig {
    pub fn validate(&self) -> Result<()> {
        if self.epsilon.is_nan() || self.epsilon <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "EM epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        if self.max_em_iters == 0 {
            return Err(Error::InvalidParameter(
                "max_em_iters must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Result of one EM fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FittedModel {
    pub w: Coefficients,
    /// Soft labels from the last E-step.
    pub t_hat: SoftLabels,
    pub params: TuningParams,
    pub em_iterations: usize,
    pub final_objective: f64,
    pub converged: bool,
    /// Number of inner Newton solves that stopped at their iteration cap.
    pub newton_cap_hits: usize,
    /// Objective value at Step 1 and after every M-step.
    pub objective_trace: Vec<f64>,
    /// Coefficients at Step 1 and after every M-step.
    #[serde(skip)]
    pub trajectory: Vec<Array1<f64>>,
}

impl FittedModel {
    /// p
    pub fn n_features(&self) -> usize {
        self.w.n_features()
    }
}

/// Powered weight vectors for one `(γ₁, γ₂)`.
#[derive(Debug, Clone)]
pub(crate) struct PoweredWeights {
    pub labeled: Array1<f64>,
    pub unlabeled: Array1<f64>,
}

impl PoweredWeights {
    pub fn new(weights: &RatioWeights, params: &TuningParams) -> Self {
        Self {
            labeled: weights.powered_labeled(params.gamma1),
            unlabeled: weights.powered_unlabeled(params.gamma2),
        }
    }
}

pub(crate) fn step1_on(
    design: &StackedDesign,
    labeled_weights: &Array1<f64>,
    lambda: f64,
    newton: &NewtonConfig,
) -> Result<(Array1<f64>, bool)> {
    let objective = WeightedLikelihood::labeled_only(design, labeled_weights, lambda);
    let init = Array1::zeros(design.n_coefficients());
    let (w, diag) = maximize(&objective, &init, newton)?;
    Ok((w, diag.converged()))
}

pub(crate) fn soft_labels_on(design: &StackedDesign, w: &Array1<f64>) -> SoftLabels {
    let t = design.unlabeled_rows().dot(w).mapv(sigmoid);
    SoftLabels::new(t).expect("sigmoid output lies in (0, 1)")
}

/// EM from a precomputed Step 1 estimate.
pub(crate) fn em_on(
    design: &StackedDesign,
    powered: &PoweredWeights,
    params: &TuningParams,
    step1: (Array1<f64>, bool),
    config: &EmConfig,
) -> Result<FittedModel> {
    let (w0, step1_converged) = step1;
    let mut newton_cap_hits = usize::from(!step1_converged);

    if design.n_unlabeled() == 0 {
        let value =
            WeightedLikelihood::labeled_only(design, &powered.labeled, params.lambda).value(&w0);
        return Ok(FittedModel {
            w: Coefficients::new(w0.clone())?,
            t_hat: SoftLabels::empty(),
            params: *params,
            em_iterations: 0,
            final_objective: value,
            converged: true,
            newton_cap_hits,
            objective_trace: vec![value],
            trajectory: vec![w0],
        });
    }

    let mut t = soft_labels_on(design, &w0);
    let mut objective = WeightedLikelihood::full(
        design,
        &powered.labeled,
        &powered.unlabeled,
        &t,
        params.lambda,
    );
    let mut previous = objective.value(&w0);
    let mut objective_trace = vec![previous];
    let mut trajectory = vec![w0.clone()];
    let mut w = w0;
    let mut converged = false;
    let mut iterations = 0;

    while iterations < config.max_em_iters {
        if iterations > 0 {
            t = soft_labels_on(design, &w);
            objective.set_soft_labels(&t);
        }
        let (next, diag) = maximize(&objective, &w, &config.newton)?;
        newton_cap_hits += usize::from(!diag.converged());
        iterations += 1;
        w = next;
        let current = diag.objective;
        objective_trace.push(current);
        trajectory.push(w.clone());
        if (current - previous).abs() < config.epsilon {
            converged = true;
            previous = current;
            break;
        }
        previous = current;
    }

    Ok(FittedModel {
        w: Coefficients::new(w)?,
        t_hat: t,
        params: *params,
        em_iterations: iterations,
        final_objective: previous,
        converged,
        newton_cap_hits,
        objective_trace,
        trajectory,
    })
}

/// Step 1: maximize the `r^γ₁`-weighted labeled terms minus the ridge term.
pub fn fit_step1(
    data: &SplitDataset,
    weights: &RatioWeights,
    params: &TuningParams,
    config: &EmConfig,
) -> Result<Coefficients> {
    weights.check_against(data)?;
    let design = StackedDesign::new(data);
    let (w, _) = step1_on(
        &design,
        &weights.powered_labeled(params.gamma1),
        params.lambda,
        &config.newton,
    )?;
    Coefficients::new(w)
}

/// E-step: `t̂_α = π(x_α; w)` on every unlabeled row.
pub fn e_step(w: &Coefficients, data: &SplitDataset) -> Result<SoftLabels> {
    if w.len() != data.n_features() + 1 {
        return Err(Error::DimensionMismatch(format!(
            "{} coefficients for {} features",
            w.len(),
            data.n_features()
        )));
    }
    let rows = design_rows(data.unlabeled_x());
    SoftLabels::new(rows.dot(w.as_array()).mapv(sigmoid))
}

/// M-step: maximize the full objective with `t̂` fixed, warm-started at `w_init`.
pub fn m_step(
    w_init: &Coefficients,
    data: &SplitDataset,
    weights: &RatioWeights,
    t_hat: &SoftLabels,
    params: &TuningParams,
    config: &EmConfig,
) -> Result<Coefficients> {
    let (w, _) = crate::objective::newton_maximize(
        w_init,
        data,
        weights,
        t_hat,
        params,
        &config.newton,
    )?;
    Ok(w)
}

/// Step 1 followed by E/M iterations until the objective settles.
pub fn fit_semisupervised(
    data: &SplitDataset,
    weights: &RatioWeights,
    params: &TuningParams,
    config: &EmConfig,
) -> Result<FittedModel> {
    config.validate()?;
    weights.check_against(data)?;
    let design = StackedDesign::new(data);
    let powered = PoweredWeights::new(weights, params);
    let step1 = step1_on(&design, &powered.labeled, params.lambda, &config.newton)?;
    em_on(&design, &powered, params, step1, config)
}

/// Class probabilities and maximum-posterior labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub labels: Array1<u8>,
    pub probabilities: Array1<f64>,
}

/// Label 1 iff `π(x; ŵ) > 0.5`; an exact tie goes to class 0.
pub fn predict_with(w: &Coefficients, x: ArrayView2<f64>) -> Result<Prediction> {
    if x.ncols() + 1 != w.len() {
        return Err(Error::DimensionMismatch(format!(
            "input has {} features, model expects {}",
            x.ncols(),
            w.n_features()
        )));
    }
    let probabilities = design_rows(x).dot(w.as_array()).mapv(sigmoid);
    let labels = probabilities.mapv(|p| u8::from(p > 0.5));
    Ok(Prediction {
        labels,
        probabilities,
    })
}

pub fn predict(model: &FittedModel, x: ArrayView2<f64>) -> Result<Prediction> {
    predict_with(&model.w, x)
}
