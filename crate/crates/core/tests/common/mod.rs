//! Independent brute-force oracles and random generators shared by the
//! integration tests. Nothing here calls into the library's algorithms.

#![allow(dead_code)]

use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

use wsce_core::graph::SimilarityGraph;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn data_dir() -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

/// Textbook Newman modularity of an unweighted undirected graph, computed
/// from its edge list: Q = Σ_c [ e_c / E − (d_c / 2E)² ].
pub fn newman_q(adj: &DMatrix<f64>, assign: &[usize]) -> f64 {
    let n = adj.nrows();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if adj[(i, j)] != 0.0 {
                edges.push((i, j));
            }
        }
    }
    let e = edges.len() as f64;
    let k = assign.iter().max().map_or(0, |m| m + 1);
    let mut internal = vec![0f64; k];
    let mut degree = vec![0f64; k];
    for &(i, j) in &edges {
        degree[assign[i]] += 1.0;
        degree[assign[j]] += 1.0;
        if assign[i] == assign[j] {
            internal[assign[i]] += 1.0;
        }
    }
    (0..k)
        .map(|c| internal[c] / e - (degree[c] / (2.0 * e)).powi(2))
        .sum()
}

/// Random simple graph on n nodes with at least one edge.
pub fn random_unweighted_graph(r: &mut impl Rng, n: usize) -> DMatrix<f64> {
    let p: f64 = r.random_range(0.15..0.8);
    loop {
        let mut a = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in i + 1..n {
                if r.random_bool(p) {
                    a[(i, j)] = 1.0;
                    a[(j, i)] = 1.0;
                }
            }
        }
        if a.sum() > 0.0 {
            return a;
        }
    }
}

/// Labels 0..k with every label used (k ≤ n).
pub fn random_partition(r: &mut impl Rng, n: usize, k: usize) -> Vec<usize> {
    let mut assign: Vec<usize> = (0..n).map(|i| if i < k { i } else { r.random_range(0..k) }).collect();
    for i in (1..n).rev() {
        assign.swap(i, r.random_range(0..=i));
    }
    assign
}

/// Best matched count over every injective map from predicted to true ids,
/// by exhaustive enumeration.
pub fn brute_force_matched(pred: &[usize], truth: &[usize]) -> usize {
    let kp = pred.iter().max().map_or(0, |m| m + 1);
    let kt = truth.iter().max().map_or(0, |m| m + 1);
    let mut counts = vec![vec![0usize; kt]; kp];
    for (&p, &t) in pred.iter().zip(truth) {
        counts[p][t] += 1;
    }
    fn go(row: usize, counts: &[Vec<usize>], used: &mut Vec<bool>) -> usize {
        if row == counts.len() {
            return 0;
        }
        // A predicted cluster may also stay unmatched.
        let mut best = go(row + 1, counts, used);
        for t in 0..used.len() {
            if !used[t] {
                used[t] = true;
                best = best.max(counts[row][t] + go(row + 1, counts, used));
                used[t] = false;
            }
        }
        best
    }
    go(0, &counts, &mut vec![false; kt])
}

/// Symmetric weighted graph made of `sizes.len()` connected blocks (a random
/// spanning chain plus random extra edges, weights in (0, 1]).
pub fn block_graph(r: &mut impl Rng, sizes: &[usize]) -> SimilarityGraph {
    let n: usize = sizes.iter().sum();
    let mut s = DMatrix::zeros(n, n);
    let mut start = 0;
    for &size in sizes {
        let mut order: Vec<usize> = (start..start + size).collect();
        for i in (1..size).rev() {
            order.swap(i, r.random_range(0..=i));
        }
        let mut pairs: Vec<(usize, usize)> = order.windows(2).map(|w| (w[0], w[1])).collect();
        for i in start..start + size {
            for j in i + 1..start + size {
                if r.random_bool(0.3) {
                    pairs.push((i, j));
                }
            }
        }
        for (i, j) in pairs {
            let w = 1.0 - r.random_range(0.0..0.99);
            s[(i, j)] = w;
            s[(j, i)] = w;
        }
        start += size;
    }
    SimilarityGraph { s, t: 1, phi: vec![1.0; n] }
}

/// Dense random data with correlated columns.
pub fn random_features(r: &mut impl Rng, n: usize, m: usize) -> DMatrix<f64> {
    let base = DMatrix::from_fn(n, m, |_, _| r.random_range(-1.0..1.0));
    let mix = DMatrix::from_fn(m, m, |i, j| if i == j { 1.0 } else { r.random_range(-0.8..0.8) });
    let scale = DMatrix::from_diagonal(&nalgebra::DVector::from_fn(m, |_, _| r.random_range(0.1..5.0)));
    base * mix * scale
}

/// Two tight, well separated isotropic Gaussian blobs.
pub fn two_blobs(r: &mut impl Rng, per: usize) -> (DMatrix<f64>, Vec<usize>) {
    use rand_distr::{Distribution, Normal};
    let noise = Normal::new(0.0, 0.3).unwrap();
    let mut x = DMatrix::zeros(2 * per, 2);
    let mut labels = Vec::new();
    for i in 0..2 * per {
        let c = i / per;
        let centre = if c == 0 { -3.0 } else { 3.0 };
        x[(i, 0)] = centre + noise.sample(r);
        x[(i, 1)] = noise.sample(r);
        labels.push(c);
    }
    (x, labels)
}
