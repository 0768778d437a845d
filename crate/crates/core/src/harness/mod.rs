//! End-to-end runs: normalize → (corrupt) → decorrelate → affinity graph →
//! two-kernel spectral ensemble → modularity weights → consensus → accuracy.

mod config;
mod manifest;
mod sweep;

use std::path::{Path, PathBuf};
use std::time::Instant;

pub use config::{
    DataSource, Method, RunConfig, DEFAULT_ENSEMBLE_SIZE, DEFAULT_HALF_RING_N, DEFAULT_HALF_RING_NOISE,
    DEFAULT_REPEATS,
};
pub use manifest::{mean_std, DatasetInfo, MemberRecord, RepeatRecord, RunManifest, StageTimings};
pub use sweep::{run_sweep, write_sweep_csv, SweepAxis, SweepCell};

use crate::consensus::{average_linkage, eac, weac, EnsembleMember};
use crate::dataset::{corrupt, normalize, Dataset};
use crate::decorrelate::fit_map;
use crate::diversity::normalized_modularity;
use crate::error::{Result, StageExt, WsceError};
use crate::evaluation::accuracy;
use crate::graph::{default_knn, distance_matrix, similarity, SimilarityGraph};
use crate::kmeans::PartitionalResult;
use crate::rng::derive_seed;
use crate::tksc::Tksc;

/// Side outputs that do not affect results.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Write per-repeat similarity triples, co-association and merge lists here.
    pub dump_dir: Option<PathBuf>,
}

/// Everything one repeat needs before the ensemble is drawn.
#[derive(Debug, Clone)]
pub struct PreparedRepeat {
    pub graph: SimilarityGraph,
    pub kernels: Tksc,
    pub retained_features: usize,
    pub knn: usize,
    pub corrupted_cells: usize,
    /// Only the decorrelate, graph and kernels fields are filled.
    pub timings: StageTimings,
}

pub fn prepare_repeat(cfg: &RunConfig, ds: &Dataset, repeat: usize) -> Result<PreparedRepeat> {
    let (normalized, _) = normalize(ds);
    let (data, corrupted_cells) = match &cfg.corruption {
        Some(spec) => {
            let mut spec = *spec;
            spec.seed = derive_seed(spec.seed, &[repeat as u64]);
            let c = corrupt(&normalized, &spec).stage("corrupt")?;
            let count = c.mask.len();
            (c.dataset, count)
        }
        None => (normalized, 0),
    };
    let mut timings = StageTimings::default();
    let t = Instant::now();
    let m = data.n_features();
    let d = cfg.features.resolve(m).stage("decorrelate")?;
    let mapped = fit_map(&data, d).stage("decorrelate")?;
    timings.decorrelate = seconds(t);
    let t = Instant::now();
    let a = distance_matrix(&mapped).stage("graph")?;
    let n = data.n_instances();
    let knn = cfg.knn.unwrap_or_else(|| default_knn(n));
    let graph = similarity(&a, knn, cfg.exponent).stage("graph")?;
    timings.graph = seconds(t);
    let t = Instant::now();
    let kernels = Tksc::new(&graph).stage("tksc")?;
    timings.kernels = seconds(t);
    Ok(PreparedRepeat {
        graph,
        kernels,
        retained_features: mapped.dims(),
        knn,
        corrupted_cells,
        timings,
    })
}

/// Cluster count of the `index`-th ensemble member: cycles through
/// 2..=min(k + 2, n).
pub fn member_l(k: usize, n: usize, index: usize) -> usize {
    let top = (k + 2).min(n).max(2);
    2 + index % (top - 1)
}

pub fn member_seed(master: u64, repeat: usize, index: usize) -> u64 {
    derive_seed(master, &[repeat as u64, index as u64])
}

/// Draw `ensemble_size` spectral partitions and score each against the
/// repeat's modular graph.
pub fn build_ensemble(
    cfg: &RunConfig,
    prepared: &PreparedRepeat,
    repeat: usize,
) -> Result<(Vec<EnsembleMember>, Vec<MemberRecord>)> {
    let n = prepared.graph.n();
    let modular = prepared.kernels.modular();
    let mut members = Vec::with_capacity(cfg.ensemble_size);
    let mut records = Vec::with_capacity(cfg.ensemble_size);
    for index in 0..cfg.ensemble_size {
        let l = member_l(cfg.k, n, index);
        let seed = member_seed(cfg.seed, repeat, index);
        let partition = prepared.kernels.partition(l, seed).stage("tksc")?;
        let score = normalized_modularity(&partition, modular).stage("diversity")?;
        records.push(MemberRecord {
            index,
            l,
            seed,
            nm: score.nm,
        });
        members.push(EnsembleMember::new(partition, score.nm).stage("diversity")?);
    }
    Ok((members, records))
}

fn seconds(since: Instant) -> f64 {
    since.elapsed().as_secs_f64()
}

fn dump(dir: &Path, name: String, write: impl FnOnce(std::fs::File) -> Result<()>) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    write(std::fs::File::create(dir.join(name))?)
}

fn run_repeat(
    cfg: &RunConfig,
    ds: &Dataset,
    repeat: usize,
    opts: &RunOptions,
) -> Result<(RepeatRecord, StageTimings)> {
    let start = Instant::now();
    let prepared = prepare_repeat(cfg, ds, repeat)?;
    let mut timings = prepared.timings.clone();
    timings.prepare = seconds(start);

    let t = Instant::now();
    let (assignment, members, fingerprint) = if cfg.method.is_ensemble() {
        let (members, records) = build_ensemble(cfg, &prepared, repeat)?;
        timings.members = seconds(t);
        let t = Instant::now();
        let xi = match cfg.method {
            Method::Wsce => weac(&members),
            _ => eac(&members),
        }
        .stage("consensus")?;
        let dendrogram = average_linkage(&xi).stage("consensus")?;
        let final_partition = dendrogram.cut(cfg.k).stage("consensus")?;
        timings.consensus = seconds(t);
        if let Some(dir) = &opts.dump_dir {
            dump(dir, format!("repeat{repeat}_xi.csv"), |f| xi.write_csv(f))?;
            dump(dir, format!("repeat{repeat}_dendrogram.csv"), |f| dendrogram.write_csv(f))?;
        }
        (
            final_partition.assign,
            records,
            Some(prepared.kernels.modular().fingerprint()),
        )
    } else {
        let seed = derive_seed(cfg.seed, &[repeat as u64, u64::MAX]);
        let p: PartitionalResult = prepared.kernels.partition(cfg.k, seed).stage("tksc")?;
        timings.members = seconds(t);
        (p.assign, Vec::new(), None)
    };
    if let Some(dir) = &opts.dump_dir {
        dump(dir, format!("repeat{repeat}_similarity.csv"), |f| {
            prepared.graph.write_triples_csv(f)
        })?;
    }

    let report = match &ds.labels {
        Some(truth) => Some(accuracy(&assignment, truth).stage("evaluation")?),
        None => None,
    };
    timings.total = seconds(start);
    Ok((
        RepeatRecord {
            repeat,
            retained_features: prepared.retained_features,
            knn: prepared.knn,
            corrupted_cells: prepared.corrupted_cells,
            modular_fingerprint: fingerprint,
            members,
            assignment,
            accuracy: report,
        },
        timings,
    ))
}

/// Run `cfg.method` on an already loaded dataset.
pub fn run_on(cfg: &RunConfig, ds: &Dataset, opts: &RunOptions) -> Result<RunManifest> {
    cfg.validate()?;
    if cfg.k > ds.n_instances() {
        return Err(WsceError::Config(format!(
            "k={} exceeds the {} instances",
            cfg.k,
            ds.n_instances()
        )));
    }
    let mut repeats = Vec::with_capacity(cfg.repeats);
    let mut timings = Vec::with_capacity(cfg.repeats);
    for r in 0..cfg.repeats {
        let (record, t) = run_repeat(cfg, ds, r, opts)?;
        repeats.push(record);
        timings.push(t);
    }
    let accuracies: Vec<f64> = repeats
        .iter()
        .filter_map(|r| r.accuracy.as_ref().map(|a| a.accuracy))
        .collect();
    let stats = mean_std(&accuracies);
    Ok(RunManifest {
        config: cfg.clone(),
        dataset: DatasetInfo {
            name: ds.name.clone(),
            n: ds.n_instances(),
            m: ds.n_features(),
            classes: ds.n_classes(),
        },
        repeats,
        accuracies,
        mean_accuracy: stats.map(|s| s.0),
        std_accuracy: stats.map(|s| s.1),
        timings,
    })
}

pub fn load_dataset(cfg: &RunConfig) -> Result<Dataset> {
    cfg.data.load(cfg.seed).stage("load")
}

/// Load the configured data and run whichever method `cfg` names.
pub fn run(cfg: &RunConfig, opts: &RunOptions) -> Result<RunManifest> {
    let ds = load_dataset(cfg)?;
    run_on(cfg, &ds, opts)
}

pub fn run_wsce(cfg: &RunConfig) -> Result<RunManifest> {
    let cfg = RunConfig {
        method: Method::Wsce,
        ..cfg.clone()
    };
    run(&cfg, &RunOptions::default())
}

pub fn run_baseline(cfg: &RunConfig) -> Result<RunManifest> {
    if cfg.method == Method::Wsce {
        return Err(WsceError::Config(
            "baseline runs take method spectral or eac_spectral".into(),
        ));
    }
    run(cfg, &RunOptions::default())
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    #[test]
    fn member_l_cycles() {
        let ls: Vec<usize> = (0..8).map(|i| member_l(2, 100, i)).collect();
        assert_eq!(ls, vec![2, 3, 4, 2, 3, 4, 2, 3]);
        assert!((0..5).all(|i| member_l(2, 2, i) == 2));
        assert_eq!(member_l(3, 4, 2), 4);
        assert_eq!(member_l(3, 4, 3), 2);
    }

    #[test]
    fn two_point_dataset_gives_singletons() {
        let ds = Dataset::new(
            "pair",
            DMatrix::from_row_slice(2, 2, &[0.0, 0.0, 1.0, 2.0]),
            Some(vec![0, 1]),
        )
        .unwrap();
        let mut cfg = RunConfig::new(DataSource::HalfRing { n: 2, noise_std: 0.0 }, 2);
        cfg.repeats = 1;
        let manifest = run_on(&cfg, &ds, &RunOptions::default()).unwrap();
        let rec = &manifest.repeats[0];
        assert_ne!(rec.assignment[0], rec.assignment[1]);
        assert_eq!(manifest.mean_accuracy, Some(1.0));
        assert_eq!(rec.members.len(), 20);
    }

    #[test]
    fn baseline_rejects_wsce() {
        let cfg = RunConfig::new(DataSource::HalfRing { n: 20, noise_std: 0.05 }, 2);
        assert!(matches!(run_baseline(&cfg), Err(WsceError::Config(_))));
    }

    #[test]
    fn stage_is_reported() {
        let mut cfg = RunConfig::new(DataSource::HalfRing { n: 20, noise_std: 0.05 }, 2);
        cfg.knn = Some(50);
        let err = run_wsce(&cfg).unwrap_err();
        assert!(err.to_string().starts_with("[graph]"), "{err}");
    }
}
