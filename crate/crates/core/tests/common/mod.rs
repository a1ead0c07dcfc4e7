#![allow(dead_code)]

use covshift_core::{RatioWeights, RngSeed, SoftLabels, SplitDataset, TuningParams};
use nalgebra::DMatrix;
use ndarray::{Array1, Array2};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};

pub struct Instance {
    pub data: SplitDataset,
    pub weights: RatioWeights,
    pub t: SoftLabels,
    pub params: TuningParams,
    pub w: Array1<f64>,
}

pub fn normal_matrix(rng: &mut ChaCha8Rng, n: usize, p: usize, scale: f64) -> Array2<f64> {
    Array2::from_shape_fn((n, p), |_| {
        let z: f64 = StandardNormal.sample(rng);
        scale * z
    })
}

/// Random problem with `p ≤ 5` features and at most 50 rows in each part.
pub fn random_instance(seed: u64) -> Instance {
    let mut rng = RngSeed(seed).rng();
    let p = rng.random_range(1..=5);
    let n1 = rng.random_range(p + 2..=50);
    let n2 = rng.random_range(0..=50);
    sized_instance(&mut rng, p, n1, n2)
}

pub fn random_instance_with(seed: u64, p: usize, n1: usize, n2: usize) -> Instance {
    sized_instance(&mut RngSeed(seed).rng(), p, n1, n2)
}

fn sized_instance(rng: &mut ChaCha8Rng, p: usize, n1: usize, n2: usize) -> Instance {
    let rng = &mut *rng;
    let lx = normal_matrix(rng, n1, p, 1.0);
    let ly = Array1::from_shape_fn(n1, |_| u8::from(rng.random_bool(0.5)));
    let ux = normal_matrix(rng, n2, p, 1.5);
    let r = Array1::from_shape_fn(n1, |_| rng.random_range(0.05..4.0));
    let s = Array1::from_shape_fn(n2, |_| rng.random_range(0.05..4.0));
    let t = Array1::from_shape_fn(n2, |_| rng.random_range(0.0..1.0));
    let params = TuningParams::new(
        rng.random_range(0.0..=1.0),
        rng.random_range(0.0..=1.0),
        10f64.powf(rng.random_range(-4.0..1.0)),
    )
    .unwrap();
    let w = Array1::from_shape_fn(p + 1, |_| rng.random_range(-1.5..1.5));
    Instance {
        data: SplitDataset::new(lx, ly, ux).unwrap(),
        weights: RatioWeights::new(r, s).unwrap(),
        t: SoftLabels::new(t).unwrap(),
        params,
        w,
    }
}

pub fn with_intercept(x: ndarray::ArrayView1<f64>) -> Vec<f64> {
    std::iter::once(1.0).chain(x.iter().copied()).collect()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

/// `y·log π + (1−y)·log(1−π)` written directly.
pub fn bernoulli_loglik(y: f64, z: f64) -> f64 {
    let pi = sigmoid(z);
    y * pi.ln() + (1.0 - y) * (1.0 - pi).ln()
}

/// Objective by explicit per-row loops.
pub fn objective_oracle(inst: &Instance, w: &[f64]) -> f64 {
    let g1 = inst.params.gamma1;
    let g2 = inst.params.gamma2;
    let mut total = 0.0;
    for (i, x) in inst.data.labeled_x().rows().into_iter().enumerate() {
        let z = dot(&with_intercept(x), w);
        let y = f64::from(inst.data.labeled_y()[i]);
        total += inst.weights.r_labeled[i].powf(g1) * bernoulli_loglik(y, z);
    }
    for (j, x) in inst.data.unlabeled_x().rows().into_iter().enumerate() {
        let z = dot(&with_intercept(x), w);
        total += inst.weights.s_unlabeled[j].powf(g2) * bernoulli_loglik(inst.t.as_array()[j], z);
    }
    let n1 = inst.data.n_labeled() as f64;
    let ridge: f64 = w[1..].iter().map(|v| v * v).sum();
    total - 0.5 * n1 * inst.params.lambda * ridge
}

/// Gradient by explicit per-row loops.
pub fn gradient_oracle(inst: &Instance, w: &[f64]) -> Vec<f64> {
    let d = w.len();
    let mut g = vec![0.0; d];
    let mut add = |x: Vec<f64>, target: f64, weight: f64| {
        let resid = target - sigmoid(dot(&x, w));
        for a in 0..d {
            g[a] += weight * resid * x[a];
        }
    };
    for (i, x) in inst.data.labeled_x().rows().into_iter().enumerate() {
        add(
            with_intercept(x),
            f64::from(inst.data.labeled_y()[i]),
            inst.weights.r_labeled[i].powf(inst.params.gamma1),
        );
    }
    for (j, x) in inst.data.unlabeled_x().rows().into_iter().enumerate() {
        add(
            with_intercept(x),
            inst.t.as_array()[j],
            inst.weights.s_unlabeled[j].powf(inst.params.gamma2),
        );
    }
    let n1 = inst.data.n_labeled() as f64;
    for a in 1..d {
        g[a] -= n1 * inst.params.lambda * w[a];
    }
    g
}

/// Q and R assembled from per-sample ψ vectors and their derivatives.
pub fn psi_oracle(inst: &Instance, w: &[f64]) -> (DMatrix<f64>, DMatrix<f64>) {
    let d = w.len();
    let n1 = inst.data.n_labeled() as f64;
    let lambda = inst.params.lambda;
    let mut q = DMatrix::<f64>::zeros(d, d);
    let mut r = DMatrix::<f64>::zeros(d, d);
    for (i, x) in inst.data.labeled_x().rows().into_iter().enumerate() {
        let xs = with_intercept(x);
        let weight = inst.weights.r_labeled[i].powf(inst.params.gamma1);
        let y = f64::from(inst.data.labeled_y()[i]);
        let pi = sigmoid(dot(&xs, w));
        let score: Vec<f64> = xs.iter().map(|v| weight * (y - pi) * v).collect();
        let psi: Vec<f64> = (0..d)
            .map(|a| score[a] - if a == 0 { 0.0 } else { lambda * w[a] })
            .collect();
        for a in 0..d {
            for b in 0..d {
                q[(a, b)] += psi[a] * score[b];
                let k = if a == b && a > 0 { lambda } else { 0.0 };
                // −∂ψ_a/∂w_b
                r[(a, b)] += weight * pi * (1.0 - pi) * xs[a] * xs[b] + k;
            }
        }
    }
    (q / n1, r / n1)
}

pub fn normal_pdf(x: f64, mean: f64, var: f64) -> f64 {
    (-(x - mean).powi(2) / (2.0 * var)).exp() / (2.0 * std::f64::consts::PI * var).sqrt()
}

pub fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let cov: f64 = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = a.iter().map(|x| (x - ma).powi(2)).sum();
    let vb: f64 = b.iter().map(|y| (y - mb).powi(2)).sum();
    cov / (va * vb).sqrt()
}

/// `n` one-dimensional draws from `N(mean, 1)`.
pub fn draws(mean: f64, n: usize, seed: u64) -> Array2<f64> {
    let mut rng = RngSeed(seed).rng();
    let d = Normal::new(mean, 1.0).unwrap();
    Array2::from_shape_fn((n, 1), |_| d.sample(&mut rng))
}

/// Central differences of `f` at `w`.
pub fn fd_gradient(f: impl Fn(&[f64]) -> f64, w: &[f64], h: f64) -> Vec<f64> {
    (0..w.len())
        .map(|a| {
            let mut up = w.to_vec();
            let mut down = w.to_vec();
            up[a] += h;
            down[a] -= h;
            (f(&up) - f(&down)) / (2.0 * h)
        })
        .collect()
}

pub fn rel_err(a: f64, b: f64, scale: f64) -> f64 {
    (a - b).abs() / scale.max(1.0)
}
