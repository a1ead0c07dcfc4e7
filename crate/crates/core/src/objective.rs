//! The ratio-weighted, ridge-penalized semi-supervised logistic likelihood
//!
//! ```text
//! ℓ*_λ(w) = Σ_lab r^γ₁ [y wᵀx* − log(1 + e^{wᵀx*})]
//!         + Σ_unl s^γ₂ [t wᵀx* − log(1 + e^{wᵀx*})] − (n₁λ/2) wᵀKw
//! ```
//!
//! with `K = diag(0, I_p)`, together with its gradient, Hessian and a
//! step-halving Newton maximizer.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2};
use serde::{Deserialize, Serialize};

use crate::data::{design_rows, DesignMatrix, SplitDataset};
use crate::error::{Error, Result};
use crate::linalg;
use crate::ratio::RatioWeights;

/// `(γ₁, γ₂, λ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TuningParams {
    pub gamma1: f64,
    pub gamma2: f64,
    pub lambda: f64,
}

impl TuningParams {
    pub fn new(gamma1: f64, gamma2: f64, lambda: f64) -> Result<Self> {
        for (name, g) in [("gamma1", gamma1), ("gamma2", gamma2)] {
            if !(0.0..=1.0).contains(&g) {
                return Err(Error::InvalidParameter(format!(
                    "{name} must lie in [0, 1], got {g}"
                )));
            }
        }
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "lambda must be positive, got {lambda}"
            )));
        }
        Ok(Self {
            gamma1,
            gamma2,
            lambda,
        })
    }

    /// Unit-weight parameters (γ₁ = γ₂ = 0).
    pub fn unweighted(lambda: f64) -> Result<Self> {
        Self::new(0.0, 0.0, lambda)
    }

    pub fn log10_lambda(&self) -> f64 {
        self.lambda.log10()
    }
}

/// Coefficient vector `w = (w₀, w₁, …, w_p)`, intercept first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Coefficients(Array1<f64>);

impl Coefficients {
    pub fn new(w: Array1<f64>) -> Result<Self> {
        if w.is_empty() {
            return Err(Error::InvalidParameter("coefficient vector is empty".into()));
        }
        if w.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(
                "coefficients must be finite".into(),
            ));
        }
        Ok(Self(w))
    }

    pub fn zeros(n_coefficients: usize) -> Self {
        Self(Array1::zeros(n_coefficients))
    }

    pub fn as_array(&self) -> &Array1<f64> {
        &self.0
    }

    pub fn view(&self) -> ArrayView1<'_, f64> {
        self.0.view()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// p
    pub fn n_features(&self) -> usize {
        self.0.len() - 1
    }

    pub fn into_inner(self) -> Array1<f64> {
        self.0
    }
}

/// E-step imputations `t̂ ∈ [0, 1]` for the unlabeled points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SoftLabels(Array1<f64>);

impl SoftLabels {
    pub fn new(t: Array1<f64>) -> Result<Self> {
        if let Some(v) = t.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::InvalidParameter(format!(
                "soft labels must lie in [0, 1], got {v}"
            )));
        }
        Ok(Self(t))
    }

    pub fn constant(n: usize, value: f64) -> Result<Self> {
        Self::new(Array1::from_elem(n, value))
    }

    pub fn empty() -> Self {
        Self(Array1::zeros(0))
    }

    pub fn as_array(&self) -> &Array1<f64> {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

const PROB_MIN: f64 = f64::MIN_POSITIVE;
const PROB_MAX: f64 = 1.0 - f64::EPSILON / 2.0;

/// Logistic function kept strictly inside (0, 1).
#[inline]
pub(crate) fn sigmoid(z: f64) -> f64 {
    let p = if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    };
    p.clamp(PROB_MIN, PROB_MAX)
}

/// `y·z − log(1 + e^z)` for `y ∈ [0, 1]`, written as
/// `−[y·log(1 + e^{−z}) + (1 − y)·log(1 + e^z)]` so it never cancels.
#[inline]
pub(crate) fn bernoulli_term(y: f64, z: f64) -> f64 {
    let mut out = 0.0;
    if y != 0.0 {
        out -= y * log1p_exp(-z);
    }
    if y != 1.0 {
        out -= (1.0 - y) * log1p_exp(z);
    }
    out
}

/// `log(1 + e^z)` without overflow.
#[inline]
pub(crate) fn log1p_exp(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `π(x; w) = exp(wᵀx*) / (1 + exp(wᵀx*))` for a design row `x*`.
pub fn posterior(w: &Coefficients, x_star: ArrayView1<f64>) -> Result<f64> {
    if x_star.len() != w.len() {
        return Err(Error::DimensionMismatch(format!(
            "design row has {} entries, coefficients have {}",
            x_star.len(),
            w.len()
        )));
    }
    Ok(sigmoid(w.0.dot(&x_star)))
}

/// Bernoulli log-likelihood `Σ [y wᵀx* − log(1 + e^{wᵀx*})]` over labeled rows.
pub fn loglik_labeled(w: &Coefficients, design: &DesignMatrix, y: &Array1<u8>) -> Result<f64> {
    if design.ncols() != w.len() || design.nrows() != y.len() {
        return Err(Error::DimensionMismatch(format!(
            "design is {}x{}, coefficients {}, labels {}",
            design.nrows(),
            design.ncols(),
            w.len(),
            y.len()
        )));
    }
    Ok(design
        .rows()
        .rows()
        .into_iter()
        .zip(y.iter())
        .map(|(x, &yi)| {
            let eta = w.0.dot(&x);
            bernoulli_term(f64::from(yi), eta)
        })
        .sum())
}

/// Labeled and unlabeled design rows stacked into one matrix, labeled first.
///
/// Built once per dataset and shared by every candidate fit.
#[derive(Debug, Clone)]
pub struct StackedDesign {
    rows: Array2<f64>,
    n_labeled: usize,
    labeled_targets: Array1<f64>,
}

impl StackedDesign {
    pub fn new(data: &SplitDataset) -> Self {
        let lab = design_rows(data.labeled_x());
        let unl = design_rows(data.unlabeled_x());
        let rows = ndarray::concatenate(ndarray::Axis(0), &[lab.view(), unl.view()])
            .expect("equal column counts")
            .as_standard_layout()
            .into_owned();
        Self {
            rows,
            n_labeled: data.n_labeled(),
            labeled_targets: data.labeled_targets(),
        }
    }

    pub fn n_labeled(&self) -> usize {
        self.n_labeled
    }

    pub fn n_unlabeled(&self) -> usize {
        self.rows.nrows() - self.n_labeled
    }

    pub fn n_coefficients(&self) -> usize {
        self.rows.ncols()
    }

    pub fn labeled_rows(&self) -> ArrayView2<'_, f64> {
        self.rows.slice(ndarray::s![..self.n_labeled, ..])
    }

    pub fn unlabeled_rows(&self) -> ArrayView2<'_, f64> {
        self.rows.slice(ndarray::s![self.n_labeled.., ..])
    }

    pub fn labeled_targets(&self) -> &Array1<f64> {
        &self.labeled_targets
    }

    fn row(&self, i: usize) -> &[f64] {
        let d = self.rows.ncols();
        &self.rows.as_slice().expect("standard layout")[i * d..(i + 1) * d]
    }
}

/// One weighted log-likelihood surface: per-row weights and targets over
/// the first `n_rows` rows of a [`StackedDesign`], plus the ridge scale `n₁λ`.
#[derive(Debug, Clone)]
pub struct WeightedLikelihood<'a> {
    design: &'a StackedDesign,
    n_rows: usize,
    weights: Vec<f64>,
    targets: Vec<f64>,
    penalty: f64,
}

/// Objective value, gradient and Hessian at one point.
#[derive(Debug, Clone)]
pub struct Evaluation {
    pub value: f64,
    pub gradient: Array1<f64>,
    pub hessian: Array2<f64>,
}

impl<'a> WeightedLikelihood<'a> {
    /// Labeled terms only (weights `r^γ₁`), as used for the initial fit.
    pub fn labeled_only(
        design: &'a StackedDesign,
        labeled_weights: &Array1<f64>,
        lambda: f64,
    ) -> Self {
        let n1 = design.n_labeled;
        Self {
            design,
            n_rows: n1,
            weights: labeled_weights.to_vec(),
            targets: design.labeled_targets.to_vec(),
            penalty: n1 as f64 * lambda,
        }
    }

    /// Labeled plus unlabeled terms with soft labels `t`.
    pub fn full(
        design: &'a StackedDesign,
        labeled_weights: &Array1<f64>,
        unlabeled_weights: &Array1<f64>,
        t: &SoftLabels,
        lambda: f64,
    ) -> Self {
        let n1 = design.n_labeled;
        let mut weights = labeled_weights.to_vec();
        weights.extend(unlabeled_weights.iter());
        let mut targets = design.labeled_targets.to_vec();
        targets.extend(t.0.iter());
        Self {
            design,
            n_rows: design.rows.nrows(),
            weights,
            targets,
            penalty: n1 as f64 * lambda,
        }
    }

    /// Replace the unlabeled targets, keeping everything else.
    pub fn set_soft_labels(&mut self, t: &SoftLabels) {
        let n1 = self.design.n_labeled;
        self.targets.truncate(n1);
        self.targets.extend(t.0.iter());
    }

    pub fn n_coefficients(&self) -> usize {
        self.design.n_coefficients()
    }

    fn penalty_term(&self, w: &[f64]) -> f64 {
        0.5 * self.penalty * w[1..].iter().map(|v| v * v).sum::<f64>()
    }

    pub fn value(&self, w: &Array1<f64>) -> f64 {
        let ws = w.as_slice().expect("contiguous");
        let mut total = 0.0;
        for i in 0..self.n_rows {
            let eta = dot(self.design.row(i), ws);
            total += self.weights[i] * bernoulli_term(self.targets[i], eta);
        }
        total - self.penalty_term(ws)
    }

    pub fn gradient(&self, w: &Array1<f64>) -> Array1<f64> {
        let ws = w.as_slice().expect("contiguous");
        let d = ws.len();
        let mut g = vec![0.0; d];
        for i in 0..self.n_rows {
            let x = self.design.row(i);
            let resid = self.weights[i] * (self.targets[i] - sigmoid(dot(x, ws)));
            for (gj, xj) in g.iter_mut().zip(x) {
                *gj += resid * xj;
            }
        }
        for j in 1..d {
            g[j] -= self.penalty * ws[j];
        }
        Array1::from(g)
    }

    pub fn hessian(&self, w: &Array1<f64>) -> Array2<f64> {
        self.evaluate(w).hessian
    }

    /// Value, gradient and Hessian in one pass over the rows.
    pub fn evaluate(&self, w: &Array1<f64>) -> Evaluation {
        let ws = w.as_slice().expect("contiguous");
        let d = ws.len();
        let mut value = 0.0;
        let mut g = vec![0.0; d];
        let mut h = vec![0.0; d * d];
        for i in 0..self.n_rows {
            let x = self.design.row(i);
            let eta = dot(x, ws);
            let pi = sigmoid(eta);
            let v = self.weights[i];
            value += v * bernoulli_term(self.targets[i], eta);
            let resid = v * (self.targets[i] - pi);
            let curv = v * pi * (1.0 - pi);
            for a in 0..d {
                g[a] += resid * x[a];
                let cx = curv * x[a];
                for b in a..d {
                    h[a * d + b] -= cx * x[b];
                }
            }
        }
        value -= self.penalty_term(ws);
        for j in 1..d {
            g[j] -= self.penalty * ws[j];
            h[j * d + j] -= self.penalty;
        }
        for a in 0..d {
            for b in 0..a {
                h[a * d + b] = h[b * d + a];
            }
        }
        Evaluation {
            value,
            gradient: Array1::from(g),
            hessian: Array2::from_shape_vec((d, d), h).expect("d x d"),
        }
    }
}

/// Inner Newton–Raphson controls.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NewtonConfig {
    pub max_iters: usize,
    pub grad_tol: f64,
    pub tol: f64,
    pub max_halvings: usize,
}

impl Default for NewtonConfig {
    fn default() -> Self {
        Self {
            max_iters: 100,
            grad_tol: 1e-8,
            tol: 1e-10,
            max_halvings: 30,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NewtonStatus {
    /// Gradient norm fell below `grad_tol`.
    GradientTolerance,
    /// A full Newton step improved the objective by less than `tol`.
    ObjectiveTolerance,
    /// No step size improved the objective (flat to machine precision).
    LineSearchExhausted,
    MaxIterations,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NewtonDiagnostics {
    pub iterations: usize,
    pub status: NewtonStatus,
    pub objective: f64,
    pub grad_norm: f64,
    /// Objective after the starting point and each accepted step.
    pub trace: Vec<f64>,
}

impl NewtonDiagnostics {
    pub fn converged(&self) -> bool {
        self.status != NewtonStatus::MaxIterations
    }
}

fn norm(v: &Array1<f64>) -> f64 {
    v.dot(v).sqrt()
}

/// Solve `(−H) d = g` for the ascent direction, boosting the ridge once on failure.
fn newton_direction(eval: &Evaluation) -> Result<Array1<f64>> {
    let neg_h = -&eval.hessian;
    let scale = neg_h.diag().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let l = linalg::cholesky_with_jitter(neg_h.view(), 1e-8 * (1.0 + scale))
        .ok_or(Error::SingularHessian)?;
    Ok(linalg::cholesky_solve(&l, eval.gradient.view()))
}

/// Maximize a concave weighted likelihood from `init`.
pub fn maximize(
    objective: &WeightedLikelihood<'_>,
    init: &Array1<f64>,
    config: &NewtonConfig,
) -> Result<(Array1<f64>, NewtonDiagnostics)> {
    let mut w = init.clone();
    let mut eval = objective.evaluate(&w);
    let mut trace = vec![eval.value];
    let mut status = NewtonStatus::MaxIterations;
    let mut iterations = 0;
    while iterations < config.max_iters {
        if norm(&eval.gradient) <= config.grad_tol {
            status = NewtonStatus::GradientTolerance;
            break;
        }
        let direction = newton_direction(&eval)?;
        // predicted gain of the full step is half the Newton decrement
        if 0.5 * eval.gradient.dot(&direction) <= config.tol {
            let candidate = &w + &direction;
            let next = objective.evaluate(&candidate);
            if next.value.is_finite() {
                w = candidate;
                eval = next;
                iterations += 1;
                trace.push(eval.value);
            }
            status = NewtonStatus::ObjectiveTolerance;
            break;
        }
        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..=config.max_halvings {
            let candidate = &w + &(step * &direction);
            let value = objective.value(&candidate);
            if value.is_finite() && value >= eval.value {
                accepted = Some((candidate, value));
                break;
            }
            step *= 0.5;
        }
        let Some((candidate, value)) = accepted else {
            status = NewtonStatus::LineSearchExhausted;
            break;
        };
        iterations += 1;
        let improvement = value - eval.value;
        w = candidate;
        eval = objective.evaluate(&w);
        trace.push(eval.value);
        if step == 1.0 && improvement <= config.tol {
            status = NewtonStatus::ObjectiveTolerance;
            break;
        }
    }
    if status == NewtonStatus::MaxIterations && norm(&eval.gradient) <= config.grad_tol {
        status = NewtonStatus::GradientTolerance;
    }
    let diagnostics = NewtonDiagnostics {
        iterations,
        status,
        objective: eval.value,
        grad_norm: norm(&eval.gradient),
        trace,
    };
    Ok((w, diagnostics))
}

fn full_likelihood<'a>(
    design: &'a StackedDesign,
    weights: &RatioWeights,
    t: &SoftLabels,
    params: &TuningParams,
) -> WeightedLikelihood<'a> {
    WeightedLikelihood::full(
        design,
        &weights.powered_labeled(params.gamma1),
        &weights.powered_unlabeled(params.gamma2),
        t,
        params.lambda,
    )
}

fn check_inputs(
    w: &Coefficients,
    data: &SplitDataset,
    weights: &RatioWeights,
    t: &SoftLabels,
) -> Result<()> {
    weights.check_against(data)?;
    if t.len() != data.n_unlabeled() {
        return Err(Error::DimensionMismatch(format!(
            "{} soft labels for {} unlabeled rows",
            t.len(),
            data.n_unlabeled()
        )));
    }
    if w.len() != data.n_features() + 1 {
        return Err(Error::DimensionMismatch(format!(
            "{} coefficients for {} features",
            w.len(),
            data.n_features()
        )));
    }
    Ok(())
}

/// `ℓ*_λ(w; γ₁, γ₂)` with the unlabeled targets fixed at `t`.
pub fn weighted_objective(
    w: &Coefficients,
    data: &SplitDataset,
    weights: &RatioWeights,
    t: &SoftLabels,
    params: &TuningParams,
) -> Result<f64> {
    check_inputs(w, data, weights, t)?;
    let design = StackedDesign::new(data);
    Ok(full_likelihood(&design, weights, t, params).value(w.as_array()))
}

/// `X_allᵀ V (ỹ − π) − n₁λKw`.
pub fn gradient(
    w: &Coefficients,
    data: &SplitDataset,
    weights: &RatioWeights,
    t: &SoftLabels,
    params: &TuningParams,
) -> Result<Array1<f64>> {
    check_inputs(w, data, weights, t)?;
    let design = StackedDesign::new(data);
    Ok(full_likelihood(&design, weights, t, params).gradient(w.as_array()))
}

/// `−X_allᵀ V Π(I − Π) X_all − n₁λK`.
pub fn hessian(
    w: &Coefficients,
    data: &SplitDataset,
    weights: &RatioWeights,
    t: &SoftLabels,
    params: &TuningParams,
) -> Result<Array2<f64>> {
    check_inputs(w, data, weights, t)?;
    let design = StackedDesign::new(data);
    Ok(full_likelihood(&design, weights, t, params).hessian(w.as_array()))
}

/// Newton–Raphson with step halving on `ℓ*_λ` with `t` held fixed.
pub fn newton_maximize(
    init: &Coefficients,
    data: &SplitDataset,
    weights: &RatioWeights,
    t: &SoftLabels,
    params: &TuningParams,
    config: &NewtonConfig,
) -> Result<(Coefficients, NewtonDiagnostics)> {
    check_inputs(init, data, weights, t)?;
    let design = StackedDesign::new(data);
    let objective = full_likelihood(&design, weights, t, params);
    let (w, diag) = maximize(&objective, init.as_array(), config)?;
    Ok((Coefficients::new(w)?, diag))
}
