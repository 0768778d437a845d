//! Lloyd's k-means with farthest-point seeding and restarts.

use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Result, WsceError};
use crate::rng::{derive_seed, rng_from};

pub const RESTARTS: usize = 10;
pub const MAX_ITER: usize = 300;

/// A hard partition of n instances into `l` non-empty clusters.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionalResult {
    pub assign: Vec<usize>,
    pub l: usize,
}

impl PartitionalResult {
    pub fn new(assign: Vec<usize>, l: usize) -> Result<Self> {
        let mut seen = vec![false; l];
        for &c in &assign {
            if c >= l {
                return Err(WsceError::Contract(format!("cluster id {c} out of range for l={l}")));
            }
            seen[c] = true;
        }
        if let Some(empty) = seen.iter().position(|s| !s) {
            return Err(WsceError::Contract(format!("cluster {empty} of {l} is empty")));
        }
        Ok(PartitionalResult { assign, l })
    }

    /// Relabel arbitrary ids to 0.. in order of first appearance.
    pub fn from_labels(labels: &[usize]) -> Self {
        let mut map = std::collections::HashMap::new();
        let assign = labels
            .iter()
            .map(|&x| {
                let next = map.len();
                *map.entry(x).or_insert(next)
            })
            .collect();
        PartitionalResult { assign, l: map.len() }
    }

    pub fn len(&self) -> usize {
        self.assign.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assign.is_empty()
    }
}

#[derive(Debug, Clone)]
pub struct KMeansFit {
    pub partition: PartitionalResult,
    pub wcss: f64,
    pub iterations: usize,
}

fn sq_dist(points: &DMatrix<f64>, i: usize, centers: &DMatrix<f64>, c: usize) -> f64 {
    points
        .row(i)
        .iter()
        .zip(centers.row(c).iter())
        .map(|(a, b)| (a - b) * (a - b))
        .sum()
}

fn count_distinct_rows(points: &DMatrix<f64>) -> usize {
    let mut rows: Vec<Vec<u64>> = points
        .row_iter()
        .map(|r| r.iter().map(|x| (x + 0.0).to_bits()).collect())
        .collect();
    rows.sort_unstable();
    rows.dedup();
    rows.len()
}

fn seed_centers<R: Rng>(points: &DMatrix<f64>, l: usize, rng: &mut R) -> DMatrix<f64> {
    let n = points.nrows();
    let mut centers = DMatrix::zeros(l, points.ncols());
    let first = rng.random_range(0..n);
    centers.set_row(0, &points.row(first));
    let mut nearest: Vec<f64> = (0..n).map(|i| sq_dist(points, i, &centers, 0)).collect();
    for c in 1..l {
        let mut pick = 0;
        for i in 1..n {
            if nearest[i] > nearest[pick] {
                pick = i;
            }
        }
        centers.set_row(c, &points.row(pick));
        for (i, d) in nearest.iter_mut().enumerate() {
            *d = d.min(sq_dist(points, i, &centers, c));
        }
    }
    centers
}

fn assign_all(points: &DMatrix<f64>, centers: &DMatrix<f64>, assign: &mut [usize]) -> bool {
    let mut changed = false;
    for (i, slot) in assign.iter_mut().enumerate() {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for c in 0..centers.nrows() {
            let d = sq_dist(points, i, centers, c);
            if d < best_d {
                best_d = d;
                best = c;
            }
        }
        if *slot != best {
            *slot = best;
            changed = true;
        }
    }
    changed
}

fn update_centers(points: &DMatrix<f64>, assign: &[usize], centers: &mut DMatrix<f64>) {
    let l = centers.nrows();
    let mut sums = DMatrix::zeros(l, points.ncols());
    let mut counts = vec![0usize; l];
    for (i, &c) in assign.iter().enumerate() {
        let mut row = sums.row_mut(c);
        row += points.row(i);
        counts[c] += 1;
    }
    for c in 0..l {
        if counts[c] > 0 {
            centers.set_row(c, &(sums.row(c) / counts[c] as f64));
        }
    }
}

/// Move the point farthest from its centroid (in a cluster of size > 1) into
/// each empty cluster.
fn repair_empty(points: &DMatrix<f64>, assign: &mut [usize], centers: &mut DMatrix<f64>) {
    let l = centers.nrows();
    loop {
        let mut counts = vec![0usize; l];
        for &c in assign.iter() {
            counts[c] += 1;
        }
        let Some(empty) = counts.iter().position(|&c| c == 0) else {
            return;
        };
        let mut far = None;
        let mut far_d = f64::NEG_INFINITY;
        for (i, &c) in assign.iter().enumerate() {
            if counts[c] > 1 {
                let d = sq_dist(points, i, centers, c);
                if d > far_d {
                    far_d = d;
                    far = Some(i);
                }
            }
        }
        let i = far.expect("n >= l guarantees a donor cluster");
        assign[i] = empty;
        centers.set_row(empty, &points.row(i));
        update_centers(points, assign, centers);
    }
}

fn lloyd<R: Rng>(points: &DMatrix<f64>, l: usize, rng: &mut R) -> KMeansFit {
    let n = points.nrows();
    let mut centers = seed_centers(points, l, rng);
    let mut assign = vec![usize::MAX; n];
    let mut iterations = 0;
    for it in 0..MAX_ITER {
        iterations = it + 1;
        let changed = assign_all(points, &centers, &mut assign);
        repair_empty(points, &mut assign, &mut centers);
        if !changed && it > 0 {
            break;
        }
        update_centers(points, &assign, &mut centers);
    }
    let wcss = assign
        .iter()
        .enumerate()
        .map(|(i, &c)| sq_dist(points, i, &centers, c))
        .sum();
    KMeansFit {
        partition: PartitionalResult::from_labels(&assign),
        wcss,
        iterations,
    }
}

/// Best-of-`RESTARTS` k-means on the rows of `points`.
pub fn kmeans_fit(points: &DMatrix<f64>, l: usize, seed: u64) -> Result<KMeansFit> {
    let n = points.nrows();
    if l < 2 || l > n {
        return Err(WsceError::Config(format!("k-means needs 2 <= l <= n (l={l}, n={n})")));
    }
    if points.iter().any(|x| !x.is_finite()) {
        return Err(WsceError::Numeric("k-means input has non-finite entries".into()));
    }
    let distinct = count_distinct_rows(points);
    if l > distinct {
        return Err(WsceError::Degenerate(format!(
            "cannot form {l} clusters from {distinct} distinct points"
        )));
    }
    let mut best: Option<KMeansFit> = None;
    for restart in 0..RESTARTS {
        let mut rng = rng_from(derive_seed(seed, &[restart as u64]));
        let fit = lloyd(points, l, &mut rng);
        if best.as_ref().is_none_or(|b| fit.wcss < b.wcss) {
            best = Some(fit);
        }
    }
    Ok(best.expect("RESTARTS > 0"))
}

pub fn kmeans(points: &DMatrix<f64>, l: usize, seed: u64) -> Result<PartitionalResult> {
    kmeans_fit(points, l, seed).map(|f| f.partition)
}
