//! Two-kernel spectral clustering.
//!
//! One similarity graph yields two results: a partition from the normalized
//! Laplacian embedding (partitional kernel) and a normalized adjacency derived
//! from the unnormalized Laplacian (modular kernel). The modular result does
//! not depend on the cluster count.

use nalgebra::DMatrix;
use sha2::{Digest, Sha256};

use crate::error::{Result, WsceError};
use crate::graph::SimilarityGraph;
use crate::kmeans::kmeans;
pub use crate::kmeans::PartitionalResult;
use crate::linalg::{sym_eigen, Order, SortedEigen};

/// Zero guard for the row normalization of the spectral embedding.
pub const EMBED_EPSILON: f64 = 1e-20;

#[derive(Debug, Clone)]
pub struct ModularResult {
    /// Symmetric n × n, zero diagonal, entries in [0, 1].
    pub m: DMatrix<f64>,
    /// Nonzero count per column.
    pub degrees: Vec<usize>,
    /// Sum of all cells of `m`.
    pub z: f64,
    /// Number of nonzero cells of `m` (twice the edge count).
    pub nonzero_cells: usize,
}

impl ModularResult {
    /// Build from an adjacency-like matrix, deriving degrees and sums.
    pub fn from_matrix(m: DMatrix<f64>) -> Result<Self> {
        let n = m.nrows();
        if m.ncols() != n {
            return Err(WsceError::Contract(format!("modular matrix is {}x{}", n, m.ncols())));
        }
        let degrees: Vec<usize> = m
            .column_iter()
            .map(|c| c.iter().filter(|&&x| x != 0.0).count())
            .collect();
        let nonzero_cells = degrees.iter().sum();
        let z = m.sum();
        Ok(ModularResult {
            m,
            degrees,
            z,
            nonzero_cells,
        })
    }

    pub fn n(&self) -> usize {
        self.m.nrows()
    }

    /// SHA-256 over the little-endian bits of `m` in column-major order.
    pub fn fingerprint(&self) -> String {
        let mut h = Sha256::new();
        h.update((self.n() as u64).to_le_bytes());
        for x in self.m.iter() {
            h.update(x.to_bits().to_le_bytes());
        }
        hex::encode(h.finalize())
    }
}

fn checked_degrees(g: &SimilarityGraph) -> Result<Vec<f64>> {
    let deg = g.degrees();
    if let Some(i) = deg.iter().position(|&d| d <= 0.0) {
        return Err(WsceError::Numeric(format!("node {i} is isolated (zero degree)")));
    }
    Ok(deg)
}

/// I − D^(−1/2) S D^(−1/2) with D the degree matrix.
pub fn partitional_kernel(g: &SimilarityGraph) -> Result<DMatrix<f64>> {
    let deg = checked_degrees(g)?;
    let inv_sqrt: Vec<f64> = deg.iter().map(|d| 1.0 / d.sqrt()).collect();
    let n = g.n();
    let mut l = DMatrix::identity(n, n);
    for i in 0..n {
        for j in 0..n {
            let s = g.s[(i, j)];
            if s != 0.0 {
                l[(i, j)] -= inv_sqrt[i] * s * inv_sqrt[j];
            }
        }
    }
    Ok((&l + l.transpose()) * 0.5)
}

/// Divide each row by its Euclidean norm plus `EMBED_EPSILON`.
pub fn normalize_rows(v: &DMatrix<f64>) -> DMatrix<f64> {
    let mut u = v.clone();
    for mut row in u.row_iter_mut() {
        let norm = row.norm() + EMBED_EPSILON;
        row /= norm;
    }
    u
}

/// Cached eigendecomposition of a partitional kernel; truncating it to the
/// first `l` eigenvectors gives the embedding for any cluster count.
#[derive(Debug, Clone)]
pub struct SpectralEmbedder {
    eigen: SortedEigen,
}

impl SpectralEmbedder {
    pub fn new(l_p: &DMatrix<f64>) -> Result<Self> {
        Ok(SpectralEmbedder {
            eigen: sym_eigen(l_p, Order::Ascending)?,
        })
    }

    /// Eigenvalues in ascending order.
    pub fn spectrum(&self) -> &[f64] {
        self.eigen.values.as_slice()
    }

    pub fn embed(&self, l: usize) -> Result<DMatrix<f64>> {
        let n = self.eigen.values.len();
        if l < 2 || l > n {
            return Err(WsceError::Config(format!("embedding needs 2 <= l <= n (l={l}, n={n})")));
        }
        Ok(normalize_rows(&self.eigen.vectors.columns(0, l).into_owned()))
    }
}

pub fn spectral_embed(l_p: &DMatrix<f64>, l: usize) -> Result<DMatrix<f64>> {
    SpectralEmbedder::new(l_p)?.embed(l)
}

/// |D − S| / max|D − S| with the diagonal then zeroed.
pub fn modular_kernel(g: &SimilarityGraph) -> Result<ModularResult> {
    let deg = g.degrees();
    let n = g.n();
    let mut m = g.s.map(f64::abs);
    for i in 0..n {
        m[(i, i)] = (deg[i] - g.s[(i, i)]).abs();
    }
    let max = m.max();
    if max <= 0.0 {
        return Err(WsceError::Numeric("similarity matrix is all zero".into()));
    }
    m /= max;
    m.fill_diagonal(0.0);
    ModularResult::from_matrix(m)
}

/// Both kernels of one similarity graph, prepared once and shared across all
/// cluster counts.
#[derive(Debug, Clone)]
pub struct Tksc {
    embedder: SpectralEmbedder,
    modular: ModularResult,
}

impl Tksc {
    pub fn new(g: &SimilarityGraph) -> Result<Self> {
        let l_p = partitional_kernel(g)?;
        Ok(Tksc {
            embedder: SpectralEmbedder::new(&l_p)?,
            modular: modular_kernel(g)?,
        })
    }

    pub fn modular(&self) -> &ModularResult {
        &self.modular
    }

    pub fn embedder(&self) -> &SpectralEmbedder {
        &self.embedder
    }

    pub fn partition(&self, l: usize, seed: u64) -> Result<PartitionalResult> {
        let u = self.embedder.embed(l)?;
        kmeans(&u, l, seed)
    }
}

pub fn tksc(g: &SimilarityGraph, l: usize, seed: u64) -> Result<(PartitionalResult, ModularResult)> {
    let kernels = Tksc::new(g)?;
    let p = kernels.partition(l, seed)?;
    Ok((p, kernels.modular))
}
