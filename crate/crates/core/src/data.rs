//! Dataset containers, design matrices and seeded randomness.

use ndarray::{s, Array1, Array2, ArrayView2, Axis};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Seed for every randomized operation in the crate.
///
/// All generators are `ChaCha8Rng`, so a seed reproduces bit-identical
/// output across platforms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngSeed(pub u64);

impl RngSeed {
    pub fn rng(self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.0)
    }

    /// An independent seed for a named sub-stream (splitmix64 finalizer).
    pub fn derive(self, stream: u64) -> RngSeed {
        let mut z = self
            .0
            .wrapping_add(stream.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        RngSeed(z ^ (z >> 31))
    }
}

/// Rows `(1, xᵀ)`: the covariates with a leading intercept column.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignMatrix {
    rows: Array2<f64>,
}

impl DesignMatrix {
    pub fn rows(&self) -> ArrayView2<'_, f64> {
        self.rows.view()
    }

    pub fn nrows(&self) -> usize {
        self.rows.nrows()
    }

    /// Number of coefficients, `p + 1`.
    pub fn ncols(&self) -> usize {
        self.rows.ncols()
    }

    pub fn into_inner(self) -> Array2<f64> {
        self.rows
    }
}

/// Prepend the intercept column to `x`.
pub fn build_design(x: ArrayView2<f64>) -> Result<DesignMatrix> {
    if x.nrows() == 0 {
        return Err(Error::EmptyDesign);
    }
    Ok(DesignMatrix {
        rows: design_rows(x),
    })
}

/// Like [`build_design`] but allows zero rows (an empty unlabeled set).
pub(crate) fn design_rows(x: ArrayView2<f64>) -> Array2<f64> {
    let mut rows = Array2::<f64>::ones((x.nrows(), x.ncols() + 1));
    rows.slice_mut(s![.., 1..]).assign(&x);
    rows
}

/// Per-column affine standardization `(x − mean) / sd`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureScaling {
    pub mean: Vec<f64>,
    pub sd: Vec<f64>,
}

impl FeatureScaling {
    /// Column means and population standard deviations; constant columns
    /// get `sd = 1`.
    pub fn fit(x: ArrayView2<f64>) -> Result<Self> {
        if x.nrows() == 0 {
            return Err(Error::EmptyDesign);
        }
        let mean = x.mean_axis(Axis(0)).expect("non-empty").to_vec();
        let sd = x
            .std_axis(Axis(0), 0.0)
            .iter()
            .map(|&s| if s > 0.0 { s } else { 1.0 })
            .collect();
        Ok(Self { mean, sd })
    }

    pub fn n_features(&self) -> usize {
        self.mean.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.mean.len() != self.sd.len() {
            return Err(Error::DimensionMismatch(format!(
                "scaling has {} means and {} standard deviations",
                self.mean.len(),
                self.sd.len()
            )));
        }
        if self.sd.iter().any(|s| !(*s > 0.0 && s.is_finite()))
            || self.mean.iter().any(|m| !m.is_finite())
        {
            return Err(Error::InvalidParameter(
                "scaling needs finite means and positive standard deviations".into(),
            ));
        }
        Ok(())
    }

    pub fn apply(&self, x: ArrayView2<f64>) -> Result<Array2<f64>> {
        if x.ncols() != self.n_features() {
            return Err(Error::DimensionMismatch(format!(
                "input has {} features, scaling expects {}",
                x.ncols(),
                self.n_features()
            )));
        }
        let mean = Array1::from(self.mean.clone());
        let sd = Array1::from(self.sd.clone());
        Ok((&x - &mean) / &sd)
    }
}

/// Labeled pairs, unlabeled covariates and an optional held-out test set.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitDataset {
    labeled_x: Array2<f64>,
    labeled_y: Array1<u8>,
    unlabeled_x: Array2<f64>,
    test: Option<(Array2<f64>, Array1<u8>)>,
}

fn check_labels(y: &Array1<u8>, what: &str) -> Result<()> {
    if let Some(pos) = y.iter().position(|&v| v > 1) {
        return Err(Error::InvalidParameter(format!(
            "{what} label at index {pos} is {}, expected 0 or 1",
            y[pos]
        )));
    }
    Ok(())
}

impl SplitDataset {
    pub fn new(
        labeled_x: Array2<f64>,
        labeled_y: Array1<u8>,
        unlabeled_x: Array2<f64>,
    ) -> Result<Self> {
        if labeled_x.nrows() == 0 {
            return Err(Error::InvalidParameter(
                "at least one labeled row is required".into(),
            ));
        }
        if labeled_x.nrows() != labeled_y.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} labeled rows but {} labels",
                labeled_x.nrows(),
                labeled_y.len()
            )));
        }
        if unlabeled_x.ncols() != labeled_x.ncols() {
            return Err(Error::DimensionMismatch(format!(
                "labeled data has {} features, unlabeled data has {}",
                labeled_x.ncols(),
                unlabeled_x.ncols()
            )));
        }
        check_labels(&labeled_y, "labeled")?;
        Ok(Self {
            labeled_x,
            labeled_y,
            unlabeled_x,
            test: None,
        })
    }

    pub fn with_test(mut self, test_x: Array2<f64>, test_y: Array1<u8>) -> Result<Self> {
        if test_x.ncols() != self.n_features() {
            return Err(Error::DimensionMismatch(format!(
                "test data has {} features, expected {}",
                test_x.ncols(),
                self.n_features()
            )));
        }
        if test_x.nrows() != test_y.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} test rows but {} labels",
                test_x.nrows(),
                test_y.len()
            )));
        }
        check_labels(&test_y, "test")?;
        self.test = Some((test_x, test_y));
        Ok(self)
    }

    pub fn labeled_x(&self) -> ArrayView2<'_, f64> {
        self.labeled_x.view()
    }

    pub fn labeled_y(&self) -> &Array1<u8> {
        &self.labeled_y
    }

    pub fn unlabeled_x(&self) -> ArrayView2<'_, f64> {
        self.unlabeled_x.view()
    }

    pub fn test(&self) -> Option<(ArrayView2<'_, f64>, &Array1<u8>)> {
        self.test.as_ref().map(|(x, y)| (x.view(), y))
    }

    /// n₁
    pub fn n_labeled(&self) -> usize {
        self.labeled_x.nrows()
    }

    /// n − n₁
    pub fn n_unlabeled(&self) -> usize {
        self.unlabeled_x.nrows()
    }

    /// n
    pub fn n_total(&self) -> usize {
        self.n_labeled() + self.n_unlabeled()
    }

    /// p
    pub fn n_features(&self) -> usize {
        self.labeled_x.ncols()
    }

    /// Labels as reals, the form the likelihood works with.
    pub fn labeled_targets(&self) -> Array1<f64> {
        self.labeled_y.mapv(f64::from)
    }

    /// The same dataset with the unlabeled rows dropped.
    pub fn labeled_only(&self) -> SplitDataset {
        SplitDataset {
            labeled_x: self.labeled_x.clone(),
            labeled_y: self.labeled_y.clone(),
            unlabeled_x: Array2::zeros((0, self.n_features())),
            test: self.test.clone(),
        }
    }

    /// A copy with the labeled rows reordered by `order`.
    pub fn permute_labeled(&self, order: &[usize]) -> SplitDataset {
        SplitDataset {
            labeled_x: self.labeled_x.select(Axis(0), order),
            labeled_y: self.labeled_y.select(Axis(0), order),
            unlabeled_x: self.unlabeled_x.clone(),
            test: self.test.clone(),
        }
    }
}

/// Number of labeled rows for a fraction: `round(fraction * n)`, at least 1.
pub fn labeled_count(n: usize, labeled_fraction: f64) -> Result<usize> {
    if !(labeled_fraction > 0.0 && labeled_fraction <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "labeled fraction must lie in (0, 1], got {labeled_fraction}"
        )));
    }
    Ok(((labeled_fraction * n as f64).round() as usize).clamp(1, n.max(1)))
}

/// Random disjoint partition of `0..n` into (labeled, unlabeled) indices,
/// each returned in ascending order.
pub fn split_indices(
    n: usize,
    labeled_fraction: f64,
    seed: RngSeed,
) -> Result<(Vec<usize>, Vec<usize>)> {
    let n_labeled = labeled_count(n, labeled_fraction)?;
    if n == 0 {
        return Err(Error::EmptyDesign);
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut seed.rng());
    let mut labeled = order[..n_labeled].to_vec();
    let mut unlabeled = order[n_labeled..].to_vec();
    labeled.sort_unstable();
    unlabeled.sort_unstable();
    Ok((labeled, unlabeled))
}

/// Randomly hide the labels of all but `round(fraction * n)` rows.
pub fn split_labeled_unlabeled(
    x: ArrayView2<f64>,
    y: &Array1<u8>,
    labeled_fraction: f64,
    seed: RngSeed,
) -> Result<SplitDataset> {
    if x.nrows() != y.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} rows but {} labels",
            x.nrows(),
            y.len()
        )));
    }
    let (labeled, unlabeled) = split_indices(x.nrows(), labeled_fraction, seed)?;
    SplitDataset::new(
        x.select(Axis(0), &labeled),
        y.select(Axis(0), &labeled),
        x.select(Axis(0), &unlabeled),
    )
}
