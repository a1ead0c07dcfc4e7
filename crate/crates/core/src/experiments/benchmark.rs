//! Benchmark CSV ingestion.
//!
//! Each dataset is a pair of files `<name>_train.csv` and `<name>_test.csv`
//! in one directory. Files are UTF-8 and comma-separated, with a header
//! row. All columns but the last are real-valued features. The last column
//! is named `label` and holds 0 or 1.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use ndarray::{Array1, Array2, Axis};
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::data::{labeled_count, RngSeed, SplitDataset};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BenchmarkName {
    G10,
    Ionosphere,
    Pima,
}

/// Expected shape of a standard train/test split.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExpectedShape {
    pub n_train: usize,
    pub n_test: usize,
    pub n_features: usize,
}

impl BenchmarkName {
    pub const ALL: [BenchmarkName; 3] = [BenchmarkName::G10, BenchmarkName::Ionosphere, BenchmarkName::Pima];

    pub fn as_str(self) -> &'static str {
        match self {
            BenchmarkName::G10 => "g10",
            BenchmarkName::Ionosphere => "ionosphere",
            BenchmarkName::Pima => "pima",
        }
    }

    pub fn expected_shape(self) -> ExpectedShape {
        match self {
            BenchmarkName::G10 => ExpectedShape { n_train: 250, n_test: 300, n_features: 10 },
            BenchmarkName::Ionosphere => ExpectedShape { n_train: 150, n_test: 206, n_features: 33 },
            BenchmarkName::Pima => ExpectedShape { n_train: 300, n_test: 232, n_features: 7 },
        }
    }

    pub fn train_file(self, dir: &Path) -> PathBuf {
        dir.join(format!("{}_train.csv", self.as_str()))
    }

    pub fn test_file(self, dir: &Path) -> PathBuf {
        dir.join(format!("{}_test.csv", self.as_str()))
    }
}

impl fmt::Display for BenchmarkName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BenchmarkName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "g10" => Ok(BenchmarkName::G10),
            "ionosphere" => Ok(BenchmarkName::Ionosphere),
            "pima" => Ok(BenchmarkName::Pima),
            other => Err(Error::InvalidParameter(format!(
                "unknown dataset '{other}', expected g10, ionosphere or pima"
            ))),
        }
    }
}

/// A fixed train/test split.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkData {
    pub train_x: Array2<f64>,
    pub train_y: Array1<u8>,
    pub test_x: Array2<f64>,
    pub test_y: Array1<u8>,
    /// Non-fatal shape mismatches found while loading.
    pub warnings: Vec<String>,
}

impl BenchmarkData {
    pub fn n_features(&self) -> usize {
        self.train_x.ncols()
    }

    /// Hide labels on all but `fraction` of the training rows and attach the test split.
    pub fn split(&self, labeled_fraction: f64, seed: RngSeed) -> Result<SplitDataset> {
        crate::data::split_labeled_unlabeled(
            self.train_x.view(),
            &self.train_y,
            labeled_fraction,
            seed,
        )?
        .with_test(self.test_x.clone(), self.test_y.clone())
    }

    /// Like [`BenchmarkData::split`], but the labeled rows are drawn with
    /// probability proportional to `exp(strength · z)`, where `z` is the
    /// standardized first feature. This gives labeled and unlabeled covariates
    /// different distributions.
    pub fn biased_split(
        &self,
        labeled_fraction: f64,
        strength: f64,
        seed: RngSeed,
    ) -> Result<SplitDataset> {
        let n = self.train_x.nrows();
        let n_labeled = labeled_count(n, labeled_fraction)?;
        let col = self.train_x.column(0);
        let mean = col.mean().unwrap_or(0.0);
        let sd = col.std(0.0).max(1e-12);
        let mut rng = seed.rng();
        // Efraimidis–Spirakis weighted sampling without replacement
        let mut keys: Vec<(f64, usize)> = col
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                let weight = (strength * (v - mean) / sd).exp();
                let u: f64 = rng.random::<f64>().max(f64::MIN_POSITIVE);
                (u.ln() / weight, i)
            })
            .collect();
        keys.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
        let mut labeled: Vec<usize> = keys[..n_labeled].iter().map(|k| k.1).collect();
        let mut unlabeled: Vec<usize> = keys[n_labeled..].iter().map(|k| k.1).collect();
        labeled.sort_unstable();
        unlabeled.sort_unstable();
        SplitDataset::new(
            self.train_x.select(Axis(0), &labeled),
            self.train_y.select(Axis(0), &labeled),
            self.train_x.select(Axis(0), &unlabeled),
        )?
        .with_test(self.test_x.clone(), self.test_y.clone())
    }

    /// Standardize every column with the training mean and standard deviation.
    pub fn standardized(&self) -> BenchmarkData {
        let mean = self.train_x.mean_axis(Axis(0)).expect("non-empty train set");
        let sd = self.train_x.std_axis(Axis(0), 0.0).mapv(|s| if s > 0.0 { s } else { 1.0 });
        let scale = |x: &Array2<f64>| (x - &mean) / &sd;
        BenchmarkData {
            train_x: scale(&self.train_x),
            train_y: self.train_y.clone(),
            test_x: scale(&self.test_x),
            test_y: self.test_y.clone(),
            warnings: self.warnings.clone(),
        }
    }
}

fn parse_error(path: &Path, row: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.display().to_string(),
        row,
        message: message.into(),
    }
}

/// Read a labeled CSV (features then a final `label` column).
///
/// Row numbers in errors count the header as row 1.
pub fn load_labeled_csv(path: &Path) -> Result<(Array2<f64>, Array1<u8>)> {
    let (x, y) = read_csv(path, true)?;
    Ok((x, y.expect("labels requested")))
}

/// Read an unlabeled CSV (feature columns only, header row required).
pub fn load_unlabeled_csv(path: &Path) -> Result<Array2<f64>> {
    Ok(read_csv(path, false)?.0)
}

fn read_csv(path: &Path, labeled: bool) -> Result<(Array2<f64>, Option<Array1<u8>>)> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| match e.into_kind() {
            csv::ErrorKind::Io(source) => Error::Io {
                path: path.display().to_string(),
                source,
            },
            other => parse_error(path, 1, format!("{other:?}")),
        })?;
    let headers = reader
        .headers()
        .map_err(|e| parse_error(path, 1, e.to_string()))?
        .clone();
    if headers.is_empty() {
        return Err(parse_error(path, 1, "missing header row"));
    }
    let n_features = if labeled {
        let last = headers.get(headers.len() - 1).unwrap_or_default();
        if !last.eq_ignore_ascii_case("label") {
            return Err(parse_error(
                path,
                1,
                format!("last column must be named 'label', found '{last}'"),
            ));
        }
        headers.len() - 1
    } else {
        headers.len()
    };

    let mut values = Vec::new();
    let mut labels = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let row = i + 2;
        let record = record.map_err(|e| parse_error(path, row, e.to_string()))?;
        if record.len() != headers.len() {
            return Err(parse_error(
                path,
                row,
                format!("expected {} columns, found {}", headers.len(), record.len()),
            ));
        }
        for (j, field) in record.iter().take(n_features).enumerate() {
            let v: f64 = field.parse().map_err(|_| {
                parse_error(path, row, format!("column {}: '{field}' is not a number", j + 1))
            })?;
            if !v.is_finite() {
                return Err(parse_error(path, row, format!("column {}: non-finite value", j + 1)));
            }
            values.push(v);
        }
        if labeled {
            let field = record.get(n_features).unwrap_or_default();
            let label = match field.parse::<f64>() {
                Ok(0.0) => 0u8,
                Ok(1.0) => 1u8,
                _ => {
                    return Err(parse_error(
                        path,
                        row,
                        format!("label '{field}' is not 0 or 1"),
                    ))
                }
            };
            labels.push(label);
        }
    }
    let n = values.len().checked_div(n_features).unwrap_or(labels.len());
    if n == 0 {
        return Err(parse_error(path, 2, "no data rows"));
    }
    let x = Array2::from_shape_vec((n, n_features), values).expect("rectangular by construction");
    Ok((x, labeled.then(|| Array1::from(labels))))
}

/// Load `<name>_train.csv` and `<name>_test.csv` from `dir`.
///
/// With `strict`, the training row count and the feature count must match
/// the standard split. A test row-count mismatch is only a warning, since
/// public copies of some datasets differ slightly in size.
pub fn load_benchmark(name: BenchmarkName, dir: &Path, strict: bool) -> Result<BenchmarkData> {
    let train_path = name.train_file(dir);
    let test_path = name.test_file(dir);
    let (train_x, train_y) = load_labeled_csv(&train_path)?;
    let (test_x, test_y) = load_labeled_csv(&test_path)?;
    if train_x.ncols() != test_x.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "{} has {} features but {} has {}",
            train_path.display(),
            train_x.ncols(),
            test_path.display(),
            test_x.ncols()
        )));
    }
    let expected = name.expected_shape();
    let mut warnings = Vec::new();
    if strict {
        if train_x.ncols() != expected.n_features {
            return Err(Error::DimensionMismatch(format!(
                "{name}: expected {} features, found {}",
                expected.n_features,
                train_x.ncols()
            )));
        }
        if train_x.nrows() != expected.n_train {
            return Err(Error::DimensionMismatch(format!(
                "{name}: expected {} training rows, found {}",
                expected.n_train,
                train_x.nrows()
            )));
        }
    }
    if test_x.nrows() != expected.n_test {
        warnings.push(format!(
            "{name}: expected {} test rows, found {}",
            expected.n_test,
            test_x.nrows()
        ));
    }
    Ok(BenchmarkData {
        train_x,
        train_y,
        test_x,
        test_y,
        warnings,
    })
}

/// Synthetic stand-in shaped like g10 (10 features, 250 train / 300 test).
///
/// This is NOT the original dataset and its error rates are not comparable
/// to results on the real data. Classes are balanced Gaussians with means `±0.35` in
/// every coordinate plus a quadratic bend in the first coordinate, so a linear
/// logit is misspecified and labeled-set covariate shift changes the best
/// linear fit.
pub fn synthetic_g10_like(seed: RngSeed) -> BenchmarkData {
    let p = 10;
    let gen = |n: usize, stream: u64| {
        let mut rng = seed.derive(stream).rng();
        let noise = Normal::new(0.0, 1.0).expect("unit variance");
        let mut x = Array2::<f64>::zeros((n, p));
        let mut y = Array1::<u8>::zeros(n);
        for i in 0..n {
            let label = u8::from(i % 2 == 0);
            let sign = if label == 1 { 1.0 } else { -1.0 };
            for j in 0..p {
                x[[i, j]] = 0.35 * sign + noise.sample(&mut rng);
            }
            // bend class 1 along the first coordinate
            if label == 1 {
                x[[i, 1]] += 0.8 * (x[[i, 0]] * x[[i, 0]] - 1.0);
            }
            y[i] = label;
        }
        (x, y)
    };
    let (train_x, train_y) = gen(250, 1);
    let (test_x, test_y) = gen(300, 2);
    BenchmarkData {
        train_x,
        train_y,
        test_x,
        test_y,
        warnings: vec!["synthetic g10-like data; not the original benchmark".into()],
    }
}
