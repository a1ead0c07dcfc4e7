use std::fmt::Write as _;
use std::path::Path;

use covshift_core::experiments::*;
use covshift_core::*;
use ndarray::{Array1, Array2};

fn write_csv(path: &Path, x: &Array2<f64>, y: &Array1<u8>) {
    let mut text = String::new();
    let header: Vec<String> = (1..=x.ncols()).map(|j| format!("x{j}")).collect();
    writeln!(text, "{},label", header.join(",")).unwrap();
    for (row, label) in x.rows().into_iter().zip(y) {
        let fields: Vec<String> = row.iter().map(|v| format!("{v:?}")).collect();
        writeln!(text, "{},{label}", fields.join(",")).unwrap();
    }
    std::fs::write(path, text).unwrap();
}

fn toy(n: usize, p: usize, offset: f64) -> (Array2<f64>, Array1<u8>) {
    let x = Array2::from_shape_fn((n, p), |(i, j)| offset + (i * (j + 3) % 17) as f64 / 7.0);
    let y = Array1::from_shape_fn(n, |i| (i % 2) as u8);
    (x, y)
}

#[test]
fn pima_shaped_files_load_strictly() {
    let dir = tempfile::tempdir().unwrap();
    let (tx, ty) = toy(300, 7, 0.0);
    let (sx, sy) = toy(232, 7, 0.5);
    write_csv(&BenchmarkName::Pima.train_file(dir.path()), &tx, &ty);
    write_csv(&BenchmarkName::Pima.test_file(dir.path()), &sx, &sy);
    let data = load_benchmark(BenchmarkName::Pima, dir.path(), true).unwrap();
    assert_eq!(data.train_x, tx);
    assert_eq!(data.test_y, sy);
    assert!(data.warnings.is_empty());
    assert_eq!(data.n_features(), 7);

    let split = data.split(0.05, RngSeed(3)).unwrap();
    assert_eq!(split.n_labeled(), 15);
    assert_eq!(split.n_unlabeled(), 285);
    assert_eq!(split.test().unwrap().0.nrows(), 232);
}

#[test]
fn strict_mode_rejects_wrong_feature_count() {
    let dir = tempfile::tempdir().unwrap();
    let (tx, ty) = toy(300, 6, 0.0);
    write_csv(&BenchmarkName::Pima.train_file(dir.path()), &tx, &ty);
    write_csv(&BenchmarkName::Pima.test_file(dir.path()), &tx, &ty);
    assert!(load_benchmark(BenchmarkName::Pima, dir.path(), true).is_err());
    let lenient = load_benchmark(BenchmarkName::Pima, dir.path(), false).unwrap();
    assert_eq!(lenient.warnings.len(), 1);
}

#[test]
fn bad_label_reports_row() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.csv");
    std::fs::write(&path, "a,b,label\n1,2,0\n3,4,1\n5,6,2\n").unwrap();
    match load_labeled_csv(&path) {
        Err(Error::Parse { row, path: p, .. }) => {
            assert_eq!(row, 4);
            assert!(p.ends_with("bad.csv"));
        }
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn biased_split_shifts_labeled_covariates() {
    let data = synthetic_g10_like(RngSeed(4));
    assert_eq!(data.train_x.dim(), (250, 10));
    assert_eq!(data.test_x.nrows(), 300);
    let split = data.biased_split(0.2, 1.0, RngSeed(5)).unwrap();
    assert_eq!(split.n_labeled(), 50);
    let lab = split.labeled_x().column(0).mean().unwrap();
    let unl = split.unlabeled_x().column(0).mean().unwrap();
    assert!(lab > unl + 0.3, "labeled mean {lab}, unlabeled mean {unl}");
    let again = data.biased_split(0.2, 1.0, RngSeed(5)).unwrap();
    assert_eq!(again.labeled_x(), split.labeled_x());
}
