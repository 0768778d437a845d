//! Fixtures shared by the benchmarks.

use wsce_core::graph::default_knn;
use wsce_core::harness::{DataSource, RunConfig};
use wsce_core::{distance_matrix, fit_map, make_half_ring, normalize, similarity, AffinityExponent, SimilarityGraph};

/// Affinity graph of a normalized half-ring sample with the default
/// neighbor count.
pub fn half_ring_graph(n: usize) -> SimilarityGraph {
    let ds = make_half_ring(n, 0.1, 0).expect("valid size");
    let (ds, _) = normalize(&ds);
    let mapped = fit_map(&ds, 0).expect("decorrelate");
    let a = distance_matrix(&mapped).expect("distances");
    similarity(&a, default_knn(n), AffinityExponent::Squared).expect("graph")
}

/// Single-repeat half-ring configuration.
pub fn half_ring_config(n: usize) -> RunConfig {
    let mut cfg = RunConfig::new(DataSource::HalfRing { n, noise_std: 0.1 }, 2);
    cfg.repeats = 1;
    cfg
}
