mod common;

use nalgebra::DMatrix;
use rand_distr::{Distribution, Normal};

use wsce_core::harness::{
    run, run_on, run_sweep, write_sweep_csv, DataSource, Method, RunConfig, RunOptions, SweepAxis,
};
use wsce_core::{load_csv, Dataset};

fn small_ring(method: Method) -> RunConfig {
    let mut cfg = RunConfig::new(DataSource::HalfRing { n: 120, noise_std: 0.1 }, 2);
    cfg.repeats = 2;
    cfg.ensemble_size = 8;
    cfg.method = method;
    cfg
}

fn iris() -> RunConfig {
    let path = common::data_dir().join("iris.csv");
    RunConfig::new(DataSource::Csv { path, label: Some("class".into()) }, 3)
}

#[test]
fn repeated_runs_are_identical() {
    let cfg = small_ring(Method::Wsce);
    let a = run(&cfg, &RunOptions::default()).unwrap();
    let b = run(&cfg, &RunOptions::default()).unwrap();
    assert_eq!(a.to_canonical_json().unwrap(), b.to_canonical_json().unwrap());
    assert_eq!(a.member_count(), 8);
    assert!(a.repeats.iter().all(|r| r.modular_fingerprint.is_some()));
}

#[test]
fn zero_rate_sweep_matches_clean_run() {
    let cfg = small_ring(Method::Wsce);
    let clean = run(&cfg, &RunOptions::default()).unwrap();
    let cells = run_sweep(&cfg, SweepAxis::Noise, &[0.0], &[Method::Wsce]).unwrap();
    let swept = cells[0].manifest.as_ref().unwrap();
    assert_eq!(swept.accuracies, clean.accuracies);
    for (a, b) in swept.repeats.iter().zip(&clean.repeats) {
        assert_eq!(a.assignment, b.assignment);
    }
}

#[test]
fn missing_sweep_has_one_row_per_cell() {
    let cfg = small_ring(Method::Wsce);
    let methods = [Method::Wsce, Method::EacSpectral, Method::Spectral];
    let cells = run_sweep(&cfg, SweepAxis::Missing, &[0.0, 0.1, 0.2, 0.3], &methods).unwrap();
    assert_eq!(cells.len(), 12);
    let mut buf = Vec::new();
    write_sweep_csv(&cells, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "value,method,mean_accuracy,std_accuracy");
    assert_eq!(lines.len(), 13);
    for m in ["wsce", "eac_spectral", "spectral"] {
        assert_eq!(lines.iter().filter(|l| l.split(',').nth(1) == Some(m)).count(), 4);
    }
    let corrupted: Vec<usize> = cells
        .iter()
        .map(|c| c.manifest.as_ref().unwrap().repeats[0].corrupted_cells)
        .collect();
    assert_eq!(&corrupted[..3], &[0, 0, 0]);
    assert_eq!(corrupted[9], 72);
}

/// Two classes separated in 5 informative dimensions, padded with 95
/// columns of pure noise.
fn wide_dataset() -> Dataset {
    let mut r = common::rng(51);
    let noise = Normal::new(0.0, 1.0).unwrap();
    let n = 120;
    let x = DMatrix::from_fn(n, 100, |i, j| {
        let shift = if j < 5 { if i < n / 2 { 4.0 } else { -4.0 } } else { 0.0 };
        shift + noise.sample(&mut r)
    });
    let labels = (0..n).map(|i| usize::from(i >= n / 2)).collect();
    Dataset::new("wide", x, Some(labels)).unwrap()
}

#[test]
fn keeping_few_directions_does_not_hurt_on_wide_data() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("wide.csv");
    wide_dataset().save_csv(&path).unwrap();
    let mut cfg = RunConfig::new(DataSource::Csv { path, label: Some("class".into()) }, 2);
    cfg.repeats = 2;
    cfg.ensemble_size = 6;
    let cells = run_sweep(&cfg, SweepAxis::DFrac, &[0.05, 1.0], &[Method::Wsce]).unwrap();
    let few = cells[0].mean_std().0;
    let all = cells[1].mean_std().0;
    assert_eq!(cells[0].manifest.as_ref().unwrap().repeats[0].retained_features, 5);
    assert!(few >= all - 0.05, "d_frac 0.05: {few}, 1.0: {all}");
}

#[test]
fn weighted_consensus_not_worse_than_unweighted() {
    let path = common::data_dir().join("wine.csv");
    let mut cfg = RunConfig::new(DataSource::Csv { path, label: Some("class".into()) }, 3);
    cfg.repeats = 3;
    let wsce = run(&cfg, &RunOptions::default()).unwrap().mean_accuracy.unwrap();
    cfg.method = Method::EacSpectral;
    let eac = run(&cfg, &RunOptions::default()).unwrap().mean_accuracy.unwrap();
    assert!(wsce >= eac - 0.02, "wsce {wsce} eac {eac}");
}

#[test]
fn spectral_baseline_has_no_members() {
    let m = run(&small_ring(Method::Spectral), &RunOptions::default()).unwrap();
    assert_eq!(m.member_count(), 0);
    assert!(m.repeats[0].modular_fingerprint.is_none());
}

#[test]
fn intermediates_are_dumped() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = small_ring(Method::Wsce);
    cfg.repeats = 1;
    let opts = RunOptions { dump_dir: Some(dir.path().to_path_buf()) };
    run(&cfg, &opts).unwrap();
    for f in ["repeat0_xi.csv", "repeat0_dendrogram.csv", "repeat0_similarity.csv"] {
        assert!(dir.path().join(f).is_file(), "{f} missing");
    }
}

#[test]
fn loads_tiny_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("tiny.csv");
    std::fs::write(&path, "a,b,y\n1,2,x\n3,4,z\n5,6,x\n").unwrap();
    let ds = load_csv(&path, Some("y")).unwrap();
    assert_eq!((ds.n_instances(), ds.n_features()), (3, 2));
    assert_eq!(ds.labels, Some(vec![0, 1, 0]));
    assert_eq!(ds.features[(2, 1)], 6.0);
}

#[test]
fn loads_iris() {
    let ds = iris().data.load(0).unwrap();
    assert_eq!((ds.n_instances(), ds.n_features(), ds.n_classes()), (150, 4, Some(3)));
}

#[test]
fn k_larger_than_n_is_rejected() {
    let ds = wide_dataset();
    let mut cfg = RunConfig::new(DataSource::HalfRing { n: 4, noise_std: 0.0 }, 200);
    cfg.ensemble_size = 201;
    assert!(run_on(&cfg, &ds, &RunOptions::default()).is_err());
}
