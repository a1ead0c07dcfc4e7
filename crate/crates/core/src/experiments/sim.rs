//! Synthetic data for the two simulation studies.
//!
//! Every `N(μ, v)` below takes a variance as its second argument.

use ndarray::{Array1, Array2};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::data::{RngSeed, SplitDataset};
use crate::error::{Error, Result};
use crate::ratio::DiagGaussian;

/// `Pr(Y = 1 | x₁, x₂) = 1 / [1 + exp{−sin(2πx₁²) − x₂ + 1}]`.
pub fn sim1_conditional_prob(x1: f64, x2: f64) -> f64 {
    let z = (2.0 * std::f64::consts::PI * x1 * x1).sin() + x2 - 1.0;
    1.0 / (1.0 + (-z).exp())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sim1Config {
    pub n_labeled: usize,
    pub n_unlabeled: usize,
    pub n_test: usize,
    pub label_density: DiagGaussian,
    pub unlabel_density: DiagGaussian,
}

/// Labeled-data density: mean `(−0.9, 1 − sin(sin(0.81π)))`, variances `(0.0015, 2)`.
pub fn sim1_label_density() -> DiagGaussian {
    let pi = std::f64::consts::PI;
    DiagGaussian::new(
        ndarray::array![-0.9, 1.0 - (0.81 * pi).sin().sin()],
        ndarray::array![0.0015, 2.0],
    )
    .expect("valid constants")
}

/// Unlabeled-data density: mean `(−0.4, 1 − sin(sin(0.16π)))`, variances `(0.05, 1)`.
pub fn sim1_unlabel_density() -> DiagGaussian {
    let pi = std::f64::consts::PI;
    DiagGaussian::new(
        ndarray::array![-0.4, 1.0 - (0.16 * pi).sin().sin()],
        ndarray::array![0.05, 1.0],
    )
    .expect("valid constants")
}

impl Sim1Config {
    pub fn new(n_labeled: usize) -> Self {
        Self {
            n_labeled,
            n_unlabeled: 500,
            n_test: 1000,
            label_density: sim1_label_density(),
            unlabel_density: sim1_unlabel_density(),
        }
    }
}

fn sample_gaussian(g: &DiagGaussian, rng: &mut ChaCha8Rng) -> Array1<f64> {
    Array1::from_shape_fn(g.dim(), |j| {
        Normal::new(g.mean()[j], g.var()[j].sqrt())
            .expect("positive variance")
            .sample(rng)
    })
}

fn bernoulli(p: f64, rng: &mut ChaCha8Rng) -> u8 {
    u8::from(rng.random::<f64>() < p)
}

fn rows_to_matrix(rows: Vec<Array1<f64>>, p: usize) -> Array2<f64> {
    let n = rows.len();
    let flat: Vec<f64> = rows.into_iter().flat_map(|r| r.into_iter()).collect();
    Array2::from_shape_vec((n, p), flat).expect("rows have p entries")
}

fn sim1_labeled_points(
    density: &DiagGaussian,
    n: usize,
    rng: &mut ChaCha8Rng,
) -> (Array2<f64>, Array1<u8>) {
    let mut xs = Vec::with_capacity(n);
    let mut ys = Vec::with_capacity(n);
    for _ in 0..n {
        let x = sample_gaussian(density, rng);
        ys.push(bernoulli(sim1_conditional_prob(x[0], x[1]), rng));
        xs.push(x);
    }
    (rows_to_matrix(xs, density.dim()), Array1::from(ys))
}

/// Simulation 1: labeled points from the labeled density, unlabeled points
/// from the unlabeled density, test points from their equal-weight mixture.
/// Labels follow [`sim1_conditional_prob`].
pub fn gen_sim1(config: &Sim1Config, seed: RngSeed) -> Result<SplitDataset> {
    if config.n_labeled == 0 {
        return Err(Error::InvalidParameter("n_labeled must be positive".into()));
    }
    if config.label_density.dim() != 2 || config.unlabel_density.dim() != 2 {
        return Err(Error::DimensionMismatch(
            "simulation 1 densities must be two-dimensional".into(),
        ));
    }
    let mut rng = seed.derive(1).rng();
    let (lx, ly) = sim1_labeled_points(&config.label_density, config.n_labeled, &mut rng);

    let mut rng = seed.derive(2).rng();
    let ux = rows_to_matrix(
        (0..config.n_unlabeled)
            .map(|_| sample_gaussian(&config.unlabel_density, &mut rng))
            .collect(),
        2,
    );

    let mut rng = seed.derive(3).rng();
    let mut tx = Vec::with_capacity(config.n_test);
    let mut ty = Vec::with_capacity(config.n_test);
    for _ in 0..config.n_test {
        let component = if rng.random::<f64>() < 0.5 {
            &config.label_density
        } else {
            &config.unlabel_density
        };
        let x = sample_gaussian(component, &mut rng);
        ty.push(bernoulli(sim1_conditional_prob(x[0], x[1]), &mut rng));
        tx.push(x);
    }
    SplitDataset::new(lx, ly, ux)?.with_test(rows_to_matrix(tx, 2), Array1::from(ty))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sim2Case {
    /// p = 2; unlabeled and test variances differ from the labeled ones.
    Case1,
    /// p = 10; one distribution for every set.
    Case2,
    /// p = 2; unlabeled and test means shifted by +1.
    Case3,
}

impl Sim2Case {
    pub const ALL: [Sim2Case; 3] = [Sim2Case::Case1, Sim2Case::Case2, Sim2Case::Case3];

    pub fn from_index(i: u8) -> Result<Self> {
        match i {
            1 => Ok(Sim2Case::Case1),
            2 => Ok(Sim2Case::Case2),
            3 => Ok(Sim2Case::Case3),
            _ => Err(Error::InvalidParameter(format!(
                "simulation 2 case must be 1, 2 or 3, got {i}"
            ))),
        }
    }

    pub fn index(self) -> u8 {
        match self {
            Sim2Case::Case1 => 1,
            Sim2Case::Case2 => 2,
            Sim2Case::Case3 => 3,
        }
    }

    pub fn dim(self) -> usize {
        match self {
            Sim2Case::Case2 => 10,
            Sim2Case::Case1 | Sim2Case::Case3 => 2,
        }
    }
}

/// Per-coordinate distribution of one class within one set.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Marginal {
    Normal { mean: f64, var: f64 },
    /// Equal-weight mixture of two normals, drawn independently per coordinate.
    Mixture { a: (f64, f64), b: (f64, f64) },
}

impl Marginal {
    fn sample(self, rng: &mut ChaCha8Rng) -> f64 {
        let (mean, var) = match self {
            Marginal::Normal { mean, var } => (mean, var),
            Marginal::Mixture { a, b } => {
                if rng.random::<f64>() < 0.5 {
                    a
                } else {
                    b
                }
            }
        };
        Normal::new(mean, var.sqrt()).expect("positive variance").sample(rng)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct ClassPair {
    /// "Class 1", coded y = 1.
    positive: Marginal,
    /// "Class 2", coded y = 0.
    negative: Marginal,
}

const fn normal(mean: f64, var: f64) -> Marginal {
    Marginal::Normal { mean, var }
}

const fn mixture(a: (f64, f64), b: (f64, f64)) -> Marginal {
    Marginal::Mixture { a, b }
}

impl Sim2Case {
    /// (labeled, unlabeled, test) class-conditional marginals.
    fn sets(self) -> [ClassPair; 3] {
        match self {
            Sim2Case::Case1 => [
                ClassPair { positive: normal(2.0, 1.0), negative: normal(-2.0, 1.0) },
                ClassPair { positive: normal(2.0, 2.0), negative: normal(-2.0, 2.0) },
                ClassPair {
                    positive: mixture((2.0, 1.0), (2.0, 2.0)),
                    negative: mixture((-2.0, 1.0), (-2.0, 2.0)),
                },
            ],
            Sim2Case::Case2 => {
                let pair = ClassPair { positive: normal(1.0, 3.0), negative: normal(-1.0, 3.0) };
                [pair, pair, pair]
            }
            Sim2Case::Case3 => [
                ClassPair { positive: normal(5.0, 2.0), negative: normal(8.0, 2.0) },
                ClassPair { positive: normal(6.0, 2.0), negative: normal(9.0, 2.0) },
                ClassPair {
                    positive: mixture((5.0, 2.0), (6.0, 2.0)),
                    negative: mixture((8.0, 2.0), (9.0, 2.0)),
                },
            ],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sim2Config {
    pub case: Sim2Case,
    pub n_labeled: usize,
    pub n_unlabeled: usize,
    pub n_test: usize,
}

impl Sim2Config {
    pub fn new(case: Sim2Case) -> Self {
        Self {
            case,
            n_labeled: 100,
            n_unlabeled: 1000,
            n_test: 1000,
        }
    }
}

/// `n` points, exactly half (rounded down) from class 1, shuffled.
fn class_balanced(
    pair: ClassPair,
    n: usize,
    p: usize,
    rng: &mut ChaCha8Rng,
) -> (Array2<f64>, Array1<u8>) {
    let n_pos = n / 2;
    let mut labels: Vec<u8> = (0..n).map(|i| u8::from(i < n_pos)).collect();
    labels.shuffle(rng);
    let mut x = Array2::<f64>::zeros((n, p));
    for (i, &y) in labels.iter().enumerate() {
        let m = if y == 1 { pair.positive } else { pair.negative };
        for j in 0..p {
            x[[i, j]] = m.sample(rng);
        }
    }
    (x, Array1::from(labels))
}

/// Simulation 2 data for one case, with equal class proportions in every set.
pub fn gen_sim2(config: &Sim2Config, seed: RngSeed) -> Result<SplitDataset> {
    if config.n_labeled == 0 {
        return Err(Error::InvalidParameter("n_labeled must be positive".into()));
    }
    let p = config.case.dim();
    let [lab, unl, test] = config.case.sets();
    let (lx, ly) = class_balanced(lab, config.n_labeled, p, &mut seed.derive(1).rng());
    let (ux, _) = class_balanced(unl, config.n_unlabeled, p, &mut seed.derive(2).rng());
    let (tx, ty) = class_balanced(test, config.n_test, p, &mut seed.derive(3).rng());
    SplitDataset::new(lx, ly, ux)?.with_test(tx, ty)
}
