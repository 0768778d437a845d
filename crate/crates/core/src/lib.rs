//! Weighted spectral cluster ensembles.
//!
//! The pipeline decorrelates the features, builds a sparsified affinity graph,
//! draws an ensemble of spectral partitions over a range of cluster counts,
//! weights each partition by its Normalized Modularity against a graph derived
//! from the unnormalized Laplacian, and combines them through a weighted
//! co-association matrix cut by average linkage. No selection threshold is
//! involved: weak members simply carry little weight.
//!
//! ```no_run
//! use wsce_core::harness::{run_wsce, DataSource, RunConfig};
//!
//! let cfg = RunConfig::new(DataSource::HalfRing { n: 400, noise_std: 0.1 }, 2);
//! let manifest = run_wsce(&cfg).unwrap();
//! println!("{:?}", manifest.mean_accuracy);
//! ```

pub mod consensus;
pub mod dataset;
pub mod decorrelate;
pub mod diversity;
pub mod error;
pub mod evaluation;
pub mod graph;
pub mod harness;
pub mod kmeans;
pub mod linalg;
pub mod rng;
pub mod tksc;

pub use consensus::{average_linkage_cut, eac, weac, CoAssociationMatrix, Dendrogram, EnsembleMember};
pub use dataset::{
    corrupt, load_csv, make_half_ring, normalize, CorruptionKind, CorruptionSpec, Dataset,
};
pub use decorrelate::{fit_map, EigenBasis, FeatureSelection, MappedData};
pub use diversity::{normalized_modularity, DiversityScore};
pub use error::{Result, WsceError};
pub use evaluation::{accuracy, AccuracyReport};
pub use graph::{distance_matrix, similarity, AffinityExponent, SimilarityGraph};
pub use kmeans::{kmeans, PartitionalResult};
pub use tksc::{modular_kernel, partitional_kernel, spectral_embed, tksc, ModularResult, Tksc};

/// Re-exported so downstream crates share the matrix type.
pub use nalgebra;
