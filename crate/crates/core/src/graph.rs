//! Pairwise distances and the sparsified, locally scaled Gaussian affinity
//! graph shared by both spectral kernels.

use std::io::Write;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::decorrelate::MappedData;
use crate::error::{Result, WsceError};

/// How the distance enters the affinity exponent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AffinityExponent {
    /// exp(-d² / (φ_i φ_j))
    #[default]
    Squared,
    /// exp(-d / (φ_i φ_j))
    Unsquared,
}

#[derive(Debug, Clone)]
pub struct SimilarityGraph {
    /// Symmetric n × n affinities, zero diagonal, entries in [0, 1].
    pub s: DMatrix<f64>,
    /// Neighbors kept per node before union symmetrization.
    pub t: usize,
    /// Local scale of each node (distance to its T-th nearest neighbor).
    pub phi: Vec<f64>,
}

impl SimilarityGraph {
    pub fn n(&self) -> usize {
        self.s.nrows()
    }

    pub fn degrees(&self) -> Vec<f64> {
        self.s.row_iter().map(|r| r.sum()).collect()
    }

    /// Nonzero off-diagonal entries as (i, j, value) rows.
    pub fn write_triples_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["i", "j", "value"])?;
        let n = self.n();
        for i in 0..n {
            for j in 0..n {
                let v = self.s[(i, j)];
                if v != 0.0 {
                    w.write_record([i.to_string(), j.to_string(), v.to_string()])?;
                }
            }
        }
        w.flush()?;
        Ok(())
    }
}

/// max(7, ⌈log₂ n⌉), capped at n − 1.
pub fn default_knn(n: usize) -> usize {
    let log = (n.max(1) as f64).log2().ceil() as usize;
    log.max(7).min(n.saturating_sub(1)).max(1)
}

/// Euclidean distances between the columns of `points` (dims × n).
pub fn pairwise_distances(points: &DMatrix<f64>) -> DMatrix<f64> {
    let n = points.ncols();
    let mut a = DMatrix::zeros(n, n);
    for i in 0..n {
        let pi = points.column(i);
        for j in (i + 1)..n {
            let d = (pi - points.column(j)).norm();
            a[(i, j)] = d;
            a[(j, i)] = d;
        }
    }
    a
}

pub fn distance_matrix(mapped: &MappedData) -> Result<DMatrix<f64>> {
    if mapped.n_instances() < 2 {
        return Err(WsceError::Contract(format!(
            "distance matrix needs n >= 2, got {}",
            mapped.n_instances()
        )));
    }
    Ok(pairwise_distances(&mapped.y))
}

/// Indices of the `t` nearest neighbors of `i` (self excluded), ties broken by index.
fn nearest(a: &DMatrix<f64>, i: usize, t: usize) -> Vec<usize> {
    let mut others: Vec<usize> = (0..a.ncols()).filter(|&j| j != i).collect();
    others.sort_by(|&x, &y| a[(i, x)].total_cmp(&a[(i, y)]).then(x.cmp(&y)));
    others.truncate(t);
    others
}

pub fn similarity(a: &DMatrix<f64>, t: usize, exponent: AffinityExponent) -> Result<SimilarityGraph> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(WsceError::Contract(format!("distance matrix is {}x{}", n, a.ncols())));
    }
    if t < 1 || t >= n {
        return Err(WsceError::Config(format!(
            "neighbor count T must satisfy 1 <= T < n (T={t}, n={n})"
        )));
    }

    let neighbors: Vec<Vec<usize>> = (0..n).map(|i| nearest(a, i, t)).collect();
    let mut phi: Vec<f64> = neighbors
        .iter()
        .enumerate()
        .map(|(i, nb)| a[(i, *nb.last().expect("t >= 1"))])
        .collect();

    let zero_scale: Vec<usize> = (0..n).filter(|&i| phi[i] <= 0.0).collect();
    if !zero_scale.is_empty() {
        let floor = phi
            .iter()
            .copied()
            .filter(|&p| p > 0.0)
            .fold(f64::INFINITY, f64::min);
        if !floor.is_finite() {
            return Err(WsceError::Degenerate(
                "every local scale is zero (all points coincide within their neighborhoods)".into(),
            ));
        }
        log::warn!(
            "{} node(s) have zero local scale; using smallest positive scale {floor:.3e}",
            zero_scale.len()
        );
        for i in zero_scale {
            phi[i] = floor;
        }
    }

    let mut s = DMatrix::zeros(n, n);
    for (i, nb) in neighbors.iter().enumerate() {
        for &j in nb {
            let d = a[(i, j)];
            let num = match exponent {
                AffinityExponent::Squared => d * d,
                AffinityExponent::Unsquared => d,
            };
            // Floor keeps underflowed kept edges in the sparsity pattern.
            let v = (-num / (phi[i] * phi[j])).exp().max(f64::MIN_POSITIVE);
            s[(i, j)] = v;
            s[(j, i)] = v;
        }
    }
    Ok(SimilarityGraph { s, t, phi })
}
