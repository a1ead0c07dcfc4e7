//! Importance weights `q_unlabel/q_label` (on labeled points) and
//! `q_label/q_unlabel` (on unlabeled points).
//!
//! Weights come either from known diagonal Gaussians ([`weights_from_exact`])
//! or from two independent uLSIF fits ([`weights_from_ulsif`]). Every weight
//! is clipped to [`ClipBounds`] so extreme ratios cannot dominate the
//! weighted likelihood. Weights are computed once, before any coefficient
//! estimation, and never updated.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis};
use rand::seq::index;
use serde::{Deserialize, Serialize};

use crate::data::{RngSeed, SplitDataset};
use crate::error::{Error, Result};
use crate::linalg;

/// Range every density-ratio value is clipped into.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClipBounds {
    pub floor: f64,
    pub cap: f64,
}

impl Default for ClipBounds {
    fn default() -> Self {
        Self {
            floor: 1e-3,
            cap: 1e3,
        }
    }
}

impl ClipBounds {
    pub fn new(floor: f64, cap: f64) -> Result<Self> {
        if !(floor >= 0.0 && cap >= floor) || floor.is_nan() || cap.is_nan() {
            return Err(Error::InvalidParameter(format!(
                "clip bounds must satisfy 0 <= floor <= cap, got [{floor}, {cap}]"
            )));
        }
        Ok(Self { floor, cap })
    }

    /// No clipping beyond non-negativity.
    pub fn none() -> Self {
        Self {
            floor: 0.0,
            cap: f64::INFINITY,
        }
    }

    pub fn apply(&self, value: f64) -> f64 {
        if value.is_nan() {
            return self.floor;
        }
        value.clamp(self.floor, self.cap)
    }
}

/// Gaussian with diagonal covariance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagGaussian {
    mean: Array1<f64>,
    var: Array1<f64>,
}

impl DiagGaussian {
    pub fn new(mean: Array1<f64>, var: Array1<f64>) -> Result<Self> {
        if mean.len() != var.len() {
            return Err(Error::DimensionMismatch(format!(
                "mean has {} entries, variance has {}",
                mean.len(),
                var.len()
            )));
        }
        if let Some(v) = var.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
            return Err(Error::InvalidParameter(format!(
                "variances must be positive and finite, got {v}"
            )));
        }
        Ok(Self { mean, var })
    }

    pub fn mean(&self) -> &Array1<f64> {
        &self.mean
    }

    pub fn var(&self) -> &Array1<f64> {
        &self.var
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }
}

/// `Σ_j [−½ log(2π var_j) − (x_j − mean_j)² / (2 var_j)]`.
pub fn log_density(g: &DiagGaussian, x: ArrayView1<f64>) -> Result<f64> {
    if x.len() != g.dim() {
        return Err(Error::DimensionMismatch(format!(
            "point has {} coordinates, density has {}",
            x.len(),
            g.dim()
        )));
    }
    let two_pi = 2.0 * std::f64::consts::PI;
    Ok(x
        .iter()
        .zip(g.mean.iter().zip(g.var.iter()))
        .map(|(&xj, (&m, &v))| -0.5 * (two_pi * v).ln() - (xj - m) * (xj - m) / (2.0 * v))
        .sum())
}

/// `num(x) / den(x)` before clipping.
pub fn exact_ratio_unclipped(
    num: &DiagGaussian,
    den: &DiagGaussian,
    x: ArrayView1<f64>,
) -> Result<f64> {
    Ok((log_density(num, x)? - log_density(den, x)?).exp())
}

/// `num(x) / den(x)` clipped into `clip`.
pub fn exact_ratio(
    num: &DiagGaussian,
    den: &DiagGaussian,
    x: ArrayView1<f64>,
    clip: ClipBounds,
) -> Result<f64> {
    Ok(clip.apply(exact_ratio_unclipped(num, den, x)?))
}

/// Ratio values on the labeled (`r`) and unlabeled (`s`) points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioWeights {
    /// `q_unlabel/q_label` at each labeled point.
    pub r_labeled: Array1<f64>,
    /// `q_label/q_unlabel` at each unlabeled point.
    pub s_unlabeled: Array1<f64>,
}

/// `value^gamma` with `0^0 = 1`, continuous in `gamma` at 0.
pub fn power_weight(value: f64, gamma: f64) -> f64 {
    if gamma == 0.0 {
        1.0
    } else if value == 0.0 {
        0.0
    } else {
        (gamma * value.ln()).exp()
    }
}

impl RatioWeights {
    pub fn new(r_labeled: Array1<f64>, s_unlabeled: Array1<f64>) -> Result<Self> {
        if r_labeled
            .iter()
            .chain(s_unlabeled.iter())
            .any(|v| !(v.is_finite() && *v >= 0.0))
        {
            return Err(Error::InvalidParameter(
                "ratio weights must be finite and non-negative".into(),
            ));
        }
        Ok(Self {
            r_labeled,
            s_unlabeled,
        })
    }

    /// Unit weights, which turn the weighted likelihood into the plain one.
    pub fn ones(n_labeled: usize, n_unlabeled: usize) -> Self {
        Self {
            r_labeled: Array1::ones(n_labeled),
            s_unlabeled: Array1::ones(n_unlabeled),
        }
    }

    pub fn ones_for(data: &SplitDataset) -> Self {
        Self::ones(data.n_labeled(), data.n_unlabeled())
    }

    pub fn powered_labeled(&self, gamma1: f64) -> Array1<f64> {
        self.r_labeled.mapv(|r| power_weight(r, gamma1))
    }

    pub fn powered_unlabeled(&self, gamma2: f64) -> Array1<f64> {
        self.s_unlabeled.mapv(|s| power_weight(s, gamma2))
    }

    pub(crate) fn check_against(&self, data: &SplitDataset) -> Result<()> {
        if self.r_labeled.len() != data.n_labeled() || self.s_unlabeled.len() != data.n_unlabeled()
        {
            return Err(Error::DimensionMismatch(format!(
                "weights have lengths ({}, {}), data has ({}, {}) labeled/unlabeled rows",
                self.r_labeled.len(),
                self.s_unlabeled.len(),
                data.n_labeled(),
                data.n_unlabeled()
            )));
        }
        Ok(())
    }
}

/// Exact weights from the labeled and unlabeled sampling densities.
pub fn weights_from_exact(
    label_density: &DiagGaussian,
    unlabel_density: &DiagGaussian,
    data: &SplitDataset,
    clip: ClipBounds,
) -> Result<RatioWeights> {
    let r = data
        .labeled_x()
        .rows()
        .into_iter()
        .map(|x| exact_ratio(unlabel_density, label_density, x, clip))
        .collect::<Result<Array1<f64>>>()?;
    let s = data
        .unlabeled_x()
        .rows()
        .into_iter()
        .map(|x| exact_ratio(label_density, unlabel_density, x, clip))
        .collect::<Result<Array1<f64>>>()?;
    RatioWeights::new(r, s)
}

/// Fitted uLSIF model `r(x) = Σ_b α_b exp(−‖x − c_b‖² / (2σ²))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UlsifModel {
    pub centers: Array2<f64>,
    pub alpha: Array1<f64>,
    pub sigma: f64,
    pub rho: f64,
    /// Leave-one-out score of the selected `(sigma, rho)`; `None` when the
    /// sample sizes were too small to cross-validate.
    pub cv_score: Option<f64>,
    pub clip: ClipBounds,
}

/// Settings for estimating both weight vectors with uLSIF.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UlsifConfig {
    /// Multiples of the median pairwise distance tried as kernel widths.
    pub sigma_factors: Vec<f64>,
    pub rhos: Vec<f64>,
    pub max_centers: usize,
    pub clip: ClipBounds,
}

impl Default for UlsifConfig {
    fn default() -> Self {
        Self {
            sigma_factors: vec![0.1, 0.25, 0.5, 1.0, 2.0, 5.0, 10.0],
            rhos: vec![1e-3, 1e-2, 1e-1, 1.0],
            max_centers: 100,
            clip: ClipBounds::default(),
        }
    }
}

pub const DEFAULT_MAX_CENTERS: usize = 100;

fn squared_distances(a: ArrayView2<f64>, b: ArrayView2<f64>) -> Array2<f64> {
    let mut d = Array2::<f64>::zeros((a.nrows(), b.nrows()));
    for (i, ai) in a.rows().into_iter().enumerate() {
        for (j, bj) in b.rows().into_iter().enumerate() {
            d[[i, j]] = ai
                .iter()
                .zip(bj.iter())
                .map(|(u, v)| (u - v) * (u - v))
                .sum();
        }
    }
    d
}

fn gaussian_kernel(sq_dist: &Array2<f64>, sigma: f64) -> Array2<f64> {
    let scale = 1.0 / (2.0 * sigma * sigma);
    sq_dist.mapv(|d| (-d * scale).exp())
}

/// Median pairwise Euclidean distance over (a seeded subsample of) the pooled samples.
pub fn median_distance(a: ArrayView2<f64>, b: ArrayView2<f64>, seed: RngSeed) -> f64 {
    const MAX_POINTS: usize = 200;
    let pooled = ndarray::concatenate(Axis(0), &[a, b]).expect("equal column counts");
    let pts = if pooled.nrows() > MAX_POINTS {
        let idx = index::sample(&mut seed.rng(), pooled.nrows(), MAX_POINTS).into_vec();
        pooled.select(Axis(0), &idx)
    } else {
        pooled
    };
    let d = squared_distances(pts.view(), pts.view());
    let mut vals: Vec<f64> = Vec::with_capacity(pts.nrows() * pts.nrows() / 2);
    for i in 0..pts.nrows() {
        for j in (i + 1)..pts.nrows() {
            vals.push(d[[i, j]].sqrt());
        }
    }
    if vals.is_empty() {
        return 1.0;
    }
    vals.sort_by(f64::total_cmp);
    let m = vals.len();
    let med = if m % 2 == 1 {
        vals[m / 2]
    } else {
        0.5 * (vals[m / 2 - 1] + vals[m / 2])
    };
    if med > 0.0 {
        med
    } else {
        1.0
    }
}

fn column_dot(a: &Array2<f64>, b: &Array2<f64>) -> Array1<f64> {
    (a * b).sum_axis(Axis(0))
}

/// Leave-one-out score of uLSIF for one `(sigma, rho)` pair, using the
/// closed-form Sherman–Woodbury update over `n_min` paired samples.
fn loo_score(
    h_mat: &Array2<f64>,
    h_vec: &Array1<f64>,
    k_den: &Array2<f64>,
    k_num: &Array2<f64>,
    n_den: usize,
    n_num: usize,
    rho: f64,
) -> Option<f64> {
    let b = h_mat.nrows();
    let n_min = k_den.ncols();
    let n_de = n_den as f64;
    let n_nu = n_num as f64;
    let mut system = h_mat.clone();
    for i in 0..b {
        system[[i, i]] += rho * (n_de - 1.0) / n_de;
    }
    let l = linalg::cholesky(system.view())?;
    let binv_x = linalg::cholesky_solve_matrix(&l, k_den.view());
    let binv_h = linalg::cholesky_solve(&l, h_vec.view());
    let denom = column_dot(k_den, &binv_x).mapv(|v| n_de - v);
    let h_binv_x = h_vec.dot(&binv_x);
    let num_binv_x = column_dot(k_num, &binv_x);
    let binv_num = linalg::cholesky_solve_matrix(&l, k_num.view());

    let mut score_den = 0.0;
    let mut score_num = 0.0;
    for i in 0..n_min {
        let c0 = h_binv_x[i] / denom[i];
        let c1 = num_binv_x[i] / denom[i];
        let mut r_de = 0.0;
        let mut r_nu = 0.0;
        for j in 0..b {
            let b0 = binv_h[j] + binv_x[[j, i]] * c0;
            let b1 = binv_num[[j, i]] + binv_x[[j, i]] * c1;
            let b2 = ((n_de - 1.0) / (n_de * (n_nu - 1.0)) * (n_nu * b0 - b1)).max(0.0);
            r_de += k_den[[j, i]] * b2;
            r_nu += k_num[[j, i]] * b2;
        }
        score_den += r_de * r_de;
        score_num += r_nu;
    }
    let score = score_den / (2.0 * n_min as f64) - score_num / n_min as f64;
    score.is_finite().then_some(score)
}

/// Fit `numerator density / denominator density` by uLSIF.
///
/// Kernel centers are `min(100, n_num)` numerator samples drawn without
/// replacement. `(sigma, rho)` is chosen by the closed-form leave-one-out
/// score; ties keep the earlier candidate. With fewer than two samples on
/// either side, cross-validation is impossible and the middle candidates are
/// used.
pub fn ulsif_fit(
    numerator_samples: ArrayView2<f64>,
    denominator_samples: ArrayView2<f64>,
    candidate_sigmas: &[f64],
    candidate_rhos: &[f64],
    seed: RngSeed,
) -> Result<UlsifModel> {
    ulsif_fit_with_centers(
        numerator_samples,
        denominator_samples,
        candidate_sigmas,
        candidate_rhos,
        DEFAULT_MAX_CENTERS,
        seed,
    )
}

pub fn ulsif_fit_with_centers(
    numerator_samples: ArrayView2<f64>,
    denominator_samples: ArrayView2<f64>,
    candidate_sigmas: &[f64],
    candidate_rhos: &[f64],
    max_centers: usize,
    seed: RngSeed,
) -> Result<UlsifModel> {
    let n_num = numerator_samples.nrows();
    let n_den = denominator_samples.nrows();
    if n_num == 0 || n_den == 0 {
        return Err(Error::InvalidParameter(
            "uLSIF needs non-empty numerator and denominator samples".into(),
        ));
    }
    if numerator_samples.ncols() != denominator_samples.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "numerator samples have {} features, denominator samples have {}",
            numerator_samples.ncols(),
            denominator_samples.ncols()
        )));
    }
    if candidate_sigmas.is_empty() || candidate_rhos.is_empty() {
        return Err(Error::InvalidParameter(
            "uLSIF needs at least one sigma and one rho candidate".into(),
        ));
    }
    if let Some(v) = candidate_sigmas
        .iter()
        .chain(candidate_rhos.iter())
        .find(|v| !(**v > 0.0 && v.is_finite()))
    {
        return Err(Error::InvalidParameter(format!(
            "uLSIF sigma and rho candidates must be positive, got {v}"
        )));
    }
    if max_centers == 0 {
        return Err(Error::InvalidParameter("max_centers must be positive".into()));
    }

    let b = max_centers.min(n_num);
    let center_idx = index::sample(&mut seed.derive(0).rng(), n_num, b).into_vec();
    let centers = numerator_samples.select(Axis(0), &center_idx);

    // kernel matrices are stored centers × samples
    let dist_den = squared_distances(centers.view(), denominator_samples);
    let dist_num = squared_distances(centers.view(), numerator_samples);

    let n_min = n_num.min(n_den);
    let can_cv = n_num >= 2 && n_den >= 2;
    let loo_den_idx = index::sample(&mut seed.derive(1).rng(), n_den, n_min).into_vec();
    let loo_num_idx = index::sample(&mut seed.derive(2).rng(), n_num, n_min).into_vec();

    let mut best: Option<(f64, f64, f64)> = None;
    if can_cv {
        for &sigma in candidate_sigmas {
            let k_den = gaussian_kernel(&dist_den, sigma);
            let k_num = gaussian_kernel(&dist_num, sigma);
            let h_mat = k_den.dot(&k_den.t()) / n_den as f64;
            let h_vec = k_num.mean_axis(Axis(1)).expect("n_num > 0");
            let k_den_loo = k_den.select(Axis(1), &loo_den_idx);
            let k_num_loo = k_num.select(Axis(1), &loo_num_idx);
            for &rho in candidate_rhos {
                if let Some(score) =
                    loo_score(&h_mat, &h_vec, &k_den_loo, &k_num_loo, n_den, n_num, rho)
                {
                    if best.is_none_or(|(s, _, _)| score < s) {
                        best = Some((score, sigma, rho));
                    }
                }
            }
        }
    }
    let (cv_score, sigma, rho) = match best {
        Some((s, sigma, rho)) => (Some(s), sigma, rho),
        None => (
            None,
            candidate_sigmas[candidate_sigmas.len() / 2],
            candidate_rhos[candidate_rhos.len() / 2],
        ),
    };

    let k_den = gaussian_kernel(&dist_den, sigma);
    let k_num = gaussian_kernel(&dist_num, sigma);
    let mut system = k_den.dot(&k_den.t()) / n_den as f64;
    for i in 0..b {
        system[[i, i]] += rho;
    }
    let h_vec = k_num.mean_axis(Axis(1)).expect("n_num > 0");
    let l = linalg::cholesky_with_jitter(system.view(), 1e-10).ok_or_else(|| {
        Error::InvalidParameter("uLSIF system is not positive definite".into())
    })?;
    let alpha = linalg::cholesky_solve(&l, h_vec.view()).mapv(|a| a.max(0.0));

    Ok(UlsifModel {
        centers,
        alpha,
        sigma,
        rho,
        cv_score,
        clip: ClipBounds::default(),
    })
}

/// Evaluate the fitted ratio at each row of `x`, clipped to the model's bounds.
pub fn ulsif_predict(model: &UlsifModel, x: ArrayView2<f64>) -> Result<Array1<f64>> {
    if x.ncols() != model.centers.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "points have {} features, model has {}",
            x.ncols(),
            model.centers.ncols()
        )));
    }
    let k = gaussian_kernel(&squared_distances(x, model.centers.view()), model.sigma);
    Ok(k.dot(&model.alpha).mapv(|v| model.clip.apply(v)))
}

/// Estimate both weight vectors with two independent uLSIF fits.
///
/// `r` uses unlabeled covariates as the numerator sample and labeled
/// covariates as the denominator; `s` swaps the roles. No `r·s = 1`
/// relation is imposed.
pub fn weights_from_ulsif(
    data: &SplitDataset,
    config: &UlsifConfig,
    seed: RngSeed,
) -> Result<RatioWeights> {
    if data.n_unlabeled() == 0 {
        return Err(Error::NoUnlabeledData);
    }
    let labeled = data.labeled_x();
    let unlabeled = data.unlabeled_x();
    let scale = median_distance(labeled, unlabeled, seed.derive(10));
    let sigmas: Vec<f64> = config.sigma_factors.iter().map(|f| f * scale).collect();

    let mut r_model = ulsif_fit_with_centers(
        unlabeled,
        labeled,
        &sigmas,
        &config.rhos,
        config.max_centers,
        seed.derive(11),
    )?;
    r_model.clip = config.clip;
    let mut s_model = ulsif_fit_with_centers(
        labeled,
        unlabeled,
        &sigmas,
        &config.rhos,
        config.max_centers,
        seed.derive(12),
    )?;
    s_model.clip = config.clip;

    RatioWeights::new(
        ulsif_predict(&r_model, labeled)?,
        ulsif_predict(&s_model, unlabeled)?,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;
    use rand_distr::{Distribution, Normal};

    fn std_normal(p: usize) -> DiagGaussian {
        DiagGaussian::new(Array1::zeros(p), Array1::ones(p)).unwrap()
    }

    #[test]
    fn log_density_standard_normal_at_zero() {
        let v = log_density(&std_normal(1), array![0.0].view()).unwrap();
        assert!((v - (-0.5 * (2.0 * std::f64::consts::PI).ln())).abs() < 1e-15);
        assert!((v + 0.918_938_533_204_672_7).abs() < 1e-12);
    }

    #[test]
    fn log_density_two_dim_hand_value() {
        let g = DiagGaussian::new(array![0.0, 0.0], array![1.0, 4.0]).unwrap();
        let v = log_density(&g, array![1.0, 2.0].view()).unwrap();
        let pi = std::f64::consts::PI;
        let expected = -0.5 * (2.0 * pi).ln() - 0.5 + -0.5 * (8.0 * pi).ln() - 0.5;
        assert!((v - expected).abs() < 1e-14);
    }

    #[test]
    fn log_density_peaks_at_mean() {
        let g = DiagGaussian::new(array![0.3, -1.0], array![0.5, 2.0]).unwrap();
        let at_mean = log_density(&g, array![0.3, -1.0].view()).unwrap();
        for x in [array![0.31, -1.0], array![0.3, -0.9], array![1.0, 1.0]] {
            assert!(log_density(&g, x.view()).unwrap() < at_mean);
        }
    }

    #[test]
    fn log_density_dimension_mismatch() {
        assert!(matches!(
            log_density(&std_normal(2), array![0.0].view()),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn rejects_nonpositive_variance() {
        assert!(DiagGaussian::new(array![0.0], array![0.0]).is_err());
        assert!(DiagGaussian::new(array![0.0], array![-1.0]).is_err());
    }

    #[test]
    fn identical_densities_give_unit_ratio() {
        let g = DiagGaussian::new(array![1.0, 2.0], array![0.1, 3.0]).unwrap();
        for x in [array![0.0, 0.0], array![10.0, -4.0]] {
            assert_eq!(exact_ratio(&g, &g, x.view(), ClipBounds::default()).unwrap(), 1.0);
        }
    }

    #[test]
    fn reciprocal_identity_before_clipping() {
        let a = DiagGaussian::new(array![-0.9, 0.2], array![0.0015, 2.0]).unwrap();
        let b = DiagGaussian::new(array![-0.4, 0.1], array![0.05, 1.0]).unwrap();
        for x in [array![-0.85, 0.0], array![-0.5, 1.0], array![-0.9, -2.0]] {
            let ab = exact_ratio_unclipped(&a, &b, x.view()).unwrap();
            let ba = exact_ratio_unclipped(&b, &a, x.view()).unwrap();
            assert!((ab * ba - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn clipping_bounds_ratio() {
        let a = DiagGaussian::new(array![0.0], array![0.001]).unwrap();
        let b = DiagGaussian::new(array![5.0], array![1.0]).unwrap();
        let clip = ClipBounds::default();
        assert_eq!(exact_ratio(&a, &b, array![0.0].view(), clip).unwrap(), 1e3);
        assert_eq!(exact_ratio(&b, &a, array![0.0].view(), clip).unwrap(), 1e-3);
    }

    #[test]
    fn power_weight_zero_gamma_is_one() {
        assert_eq!(power_weight(0.0, 0.0), 1.0);
        assert_eq!(power_weight(123.0, 0.0), 1.0);
        assert_eq!(power_weight(0.0, 0.5), 0.0);
        assert!((power_weight(4.0, 0.5) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn exact_weights_shapes_and_identity() {
        let g = std_normal(2);
        let data = SplitDataset::new(
            array![[0.0, 1.0], [2.0, 3.0]],
            array![0, 1],
            Array2::zeros((0, 2)),
        )
        .unwrap();
        let w = weights_from_exact(&g, &g, &data, ClipBounds::default()).unwrap();
        assert_eq!(w.r_labeled, array![1.0, 1.0]);
        assert_eq!(w.s_unlabeled.len(), 0);
    }

    #[test]
    fn ulsif_predict_zero_model_is_floor() {
        let model = UlsifModel {
            centers: array![[0.0], [1.0]],
            alpha: array![0.0, 0.0],
            sigma: 1.0,
            rho: 0.1,
            cv_score: None,
            clip: ClipBounds::default(),
        };
        let out = ulsif_predict(&model, array![[0.5], [3.0]].view()).unwrap();
        assert!(out.iter().all(|&v| v == 1e-3));
    }

    #[test]
    fn ulsif_predict_single_kernel_at_center() {
        let model = UlsifModel {
            centers: array![[0.4, -0.2]],
            alpha: array![1.0],
            sigma: 0.7,
            rho: 0.1,
            cv_score: None,
            clip: ClipBounds::default(),
        };
        let out = ulsif_predict(&model, array![[0.4, -0.2]].view()).unwrap();
        assert_eq!(out[0], 1.0);
    }

    fn normal_samples(n: usize, mean: f64, seed: u64) -> Array2<f64> {
        let mut rng = RngSeed(seed).rng();
        let d = Normal::new(mean, 1.0).unwrap();
        Array2::from_shape_fn((n, 1), |_| d.sample(&mut rng))
    }

    #[test]
    fn ulsif_center_cap() {
        let sigmas = [0.5, 1.0];
        let rhos = [0.1];
        let small = normal_samples(30, 0.0, 1);
        let big = normal_samples(250, 0.0, 2);
        let m = ulsif_fit(small.view(), big.view(), &sigmas, &rhos, RngSeed(0)).unwrap();
        assert_eq!(m.centers.nrows(), 30);
        let m = ulsif_fit(big.view(), small.view(), &sigmas, &rhos, RngSeed(0)).unwrap();
        assert_eq!(m.centers.nrows(), 100);
        assert!(m.alpha.iter().all(|&a| a >= 0.0));
    }

    #[test]
    fn ulsif_identical_samples_near_one() {
        let x = normal_samples(200, 0.0, 5);
        let sigmas: Vec<f64> = [0.1, 0.25, 0.5, 1.0, 2.0, 5.0, 10.0].to_vec();
        let rhos = [1e-3, 1e-2, 1e-1, 1.0];
        let m = ulsif_fit(x.view(), x.view(), &sigmas, &rhos, RngSeed(9)).unwrap();
        let pred = ulsif_predict(&m, x.view()).unwrap();
        let inside = pred.iter().filter(|&&v| (0.5..=2.0).contains(&v)).count();
        assert!(inside as f64 >= 0.95 * 200.0, "{inside} of 200 inside");
        let mean = pred.mean().unwrap();
        assert!((0.8..=1.25).contains(&mean), "mean {mean}");
    }

    #[test]
    fn ulsif_rejects_bad_candidates() {
        let x = normal_samples(10, 0.0, 1);
        assert!(ulsif_fit(x.view(), x.view(), &[0.0], &[0.1], RngSeed(0)).is_err());
        assert!(ulsif_fit(x.view(), x.view(), &[1.0], &[-0.1], RngSeed(0)).is_err());
        let empty = Array2::<f64>::zeros((0, 1));
        assert!(ulsif_fit(empty.view(), x.view(), &[1.0], &[0.1], RngSeed(0)).is_err());
    }

    #[test]
    fn ulsif_is_deterministic() {
        let a = normal_samples(80, 0.0, 1);
        let b = normal_samples(60, 0.5, 2);
        let f = || ulsif_fit(a.view(), b.view(), &[0.5, 1.0, 2.0], &[0.01, 0.1], RngSeed(4));
        assert_eq!(f().unwrap(), f().unwrap());
    }

    #[test]
    fn ulsif_weights_require_unlabeled() {
        let data =
            SplitDataset::new(array![[0.0], [1.0]], array![0, 1], Array2::zeros((0, 1))).unwrap();
        assert!(matches!(
            weights_from_ulsif(&data, &UlsifConfig::default(), RngSeed(0)),
            Err(Error::NoUnlabeledData)
        ));
    }

    #[test]
    fn ulsif_weights_same_distribution() {
        let lab = normal_samples(150, 0.0, 21);
        let unl = normal_samples(300, 0.0, 22);
        let y = Array1::from_shape_fn(150, |i| (i % 2) as u8);
        let data = SplitDataset::new(lab, y, unl).unwrap();
        let w = weights_from_ulsif(&data, &UlsifConfig::default(), RngSeed(3)).unwrap();
        assert_eq!(w.r_labeled.len(), 150);
        assert_eq!(w.s_unlabeled.len(), 300);
        let mr = w.r_labeled.mean().unwrap();
        let ms = w.s_unlabeled.mean().unwrap();
        assert!((0.8..=1.25).contains(&mr), "mean r {mr}");
        assert!((0.8..=1.25).contains(&ms), "mean s {ms}");
        let clip = ClipBounds::default();
        assert!(w
            .r_labeled
            .iter()
            .chain(w.s_unlabeled.iter())
            .all(|&v| v >= clip.floor && v <= clip.cap));
    }
}
