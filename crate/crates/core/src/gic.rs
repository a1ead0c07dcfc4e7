//! Generalized information criterion for the weighted model.
//!
//! With `Ŵ = diag(r^γ₁)`, `Λ̂ = diag(y − π̂)` and `Π̂ = diag(π̂)` over the
//! labeled rows `X`:
//!
//! ```text
//! Q = (1/n₁) [XᵀŴ²Λ̂²X − λKŵ·1ᵀŴΛ̂X]
//! R = (1/n₁) XᵀΠ̂Ŵ(I − Π̂)X + λK
//! GIC = −2 Σ r^γ₁ log f(y | x; ŵ) + 2 tr(Q R⁻¹)
//! ```
//!
//! Only labeled rows enter the criterion; unlabeled data and `γ₂` act
//! through `ŵ`.

use ndarray::{Array1, Array2, ArrayView2};
use serde::{Deserialize, Serialize};

use crate::data::SplitDataset;
use crate::em::FittedModel;
use crate::error::{Error, Result};
use crate::linalg;
use crate::objective::{bernoulli_term, sigmoid, StackedDesign, TuningParams};
use crate::ratio::RatioWeights;

#[derive(Debug, Clone, PartialEq)]
pub struct GicMatrices {
    pub q: Array2<f64>,
    pub r: Array2<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GicReport {
    pub gic: f64,
    /// `−2 Σ r^γ₁ log f(y | x; ŵ)`
    pub weighted_nll: f64,
    /// `tr(Q R⁻¹)`
    pub trace_term: f64,
    pub params: TuningParams,
}

pub(crate) fn matrices_on(
    labeled_rows: ArrayView2<f64>,
    targets: &Array1<f64>,
    w: &Array1<f64>,
    labeled_weights: &Array1<f64>,
    lambda: f64,
) -> GicMatrices {
    let n1 = labeled_rows.nrows();
    let d = labeled_rows.ncols();
    let mut q = Array2::<f64>::zeros((d, d));
    let mut r = Array2::<f64>::zeros((d, d));
    let mut score_sum = Array1::<f64>::zeros(d);
    for ((x, &y), &wt) in labeled_rows
        .rows()
        .into_iter()
        .zip(targets.iter())
        .zip(labeled_weights.iter())
    {
        let pi = sigmoid(x.dot(w));
        let resid = y - pi;
        let qa = wt * wt * resid * resid;
        let ra = pi * wt * (1.0 - pi);
        for a in 0..d {
            score_sum[a] += wt * resid * x[a];
            for b in 0..d {
                q[[a, b]] += qa * x[a] * x[b];
            }
            for b in a..d {
                r[[a, b]] += ra * x[a] * x[b];
            }
        }
    }
    // −λKŵ · (1ᵀŴΛ̂X): rank-one term, row 0 untouched since K zeroes the intercept
    for a in 1..d {
        for b in 0..d {
            q[[a, b]] -= lambda * w[a] * score_sum[b];
        }
    }
    let scale = 1.0 / n1 as f64;
    q *= scale;
    r *= scale;
    for a in 0..d {
        for b in 0..a {
            r[[a, b]] = r[[b, a]];
        }
    }
    for a in 1..d {
        r[[a, a]] += lambda;
    }
    GicMatrices { q, r }
}

/// `tr(Q R⁻¹)` via a Cholesky factorization of `R`.
pub fn trace_q_rinv(m: &GicMatrices) -> Result<f64> {
    let l = linalg::cholesky_with_jitter(m.r.view(), 1e-10).ok_or(Error::DegenerateInformation)?;
    // tr(Q R⁻¹) = tr(R⁻¹ Q)
    let x = linalg::cholesky_solve_matrix(&l, m.q.view());
    Ok(x.diag().sum())
}

pub(crate) fn score_on(
    labeled_rows: ArrayView2<f64>,
    targets: &Array1<f64>,
    w: &Array1<f64>,
    labeled_weights: &Array1<f64>,
    params: &TuningParams,
) -> Result<GicReport> {
    let loglik: f64 = labeled_rows
        .rows()
        .into_iter()
        .zip(targets.iter())
        .zip(labeled_weights.iter())
        .map(|((x, &y), &wt)| {
            let eta = x.dot(w);
            wt * bernoulli_term(y, eta)
        })
        .sum();
    let weighted_nll = -2.0 * loglik;
    let m = matrices_on(labeled_rows, targets, w, labeled_weights, params.lambda);
    let trace_term = trace_q_rinv(&m)?;
    Ok(GicReport {
        gic: weighted_nll + 2.0 * trace_term,
        weighted_nll,
        trace_term,
        params: *params,
    })
}

fn check(model: &FittedModel, data: &SplitDataset) -> Result<()> {
    if model.w.len() != data.n_features() + 1 {
        return Err(Error::DimensionMismatch(format!(
            "model has {} coefficients, data has {} features",
            model.w.len(),
            data.n_features()
        )));
    }
    Ok(())
}

/// `Q` and `R` at the fitted coefficients, with weights `r^γ₁`.
pub fn gic_matrices(
    model: &FittedModel,
    data: &SplitDataset,
    weights: &RatioWeights,
) -> Result<GicMatrices> {
    check(model, data)?;
    weights.check_against(data)?;
    let design = StackedDesign::new(data);
    let m = matrices_on(
        design.labeled_rows(),
        design.labeled_targets(),
        model.w.as_array(),
        &weights.powered_labeled(model.params.gamma1),
        model.params.lambda,
    );
    if linalg::cholesky_with_jitter(m.r.view(), 1e-10).is_none() {
        return Err(Error::DegenerateInformation);
    }
    Ok(m)
}

/// GIC of a covariate-shift fit.
pub fn gic_score(
    model: &FittedModel,
    data: &SplitDataset,
    weights: &RatioWeights,
) -> Result<GicReport> {
    check(model, data)?;
    weights.check_against(data)?;
    let design = StackedDesign::new(data);
    score_on(
        design.labeled_rows(),
        design.labeled_targets(),
        model.w.as_array(),
        &weights.powered_labeled(model.params.gamma1),
        &model.params,
    )
}

/// GIC with every ratio set to 1, for the unweighted semi-supervised fit.
pub fn gic_lsslr(model: &FittedModel, data: &SplitDataset) -> Result<GicReport> {
    gic_score(model, data, &RatioWeights::ones_for(data))
}

/// GIC of a labeled-only ridge fit. Algebraically the unit-weight criterion;
/// the model itself never saw unlabeled data.
pub fn gic_slr(model_supervised: &FittedModel, data: &SplitDataset) -> Result<GicReport> {
    gic_lsslr(model_supervised, data)
}
