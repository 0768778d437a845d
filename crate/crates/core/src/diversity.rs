//! Normalized Modularity: how well a partition agrees with the community
//! structure of the modular graph, rescaled into [0, 1].
//!
//! ```text
//! NM = 1/2 + 1/(4z) · Σ_ij [Γ_ij − σ_i σ_j / (2z)] · [c_i = c_j]
//! ```
//!
//! Γ is the nonzero pattern of M and σ the per-column nonzero count. The sum
//! runs over all ordered pairs, diagonal included. z is taken on the same
//! count basis as σ and Γ (the number of nonzero cells of M). For a 0/1
//! adjacency that equals the plain sum of M's cells; for weighted M it keeps
//! the expected-edge term on the scale of the observed one, which the
//! weighted cell sum does not.

use serde::{Deserialize, Serialize};

use crate::error::{Result, WsceError};
use crate::kmeans::PartitionalResult;
use crate::tksc::ModularResult;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiversityScore {
    pub nm: f64,
    pub l: usize,
}

pub fn normalized_modularity(p: &PartitionalResult, m: &ModularResult) -> Result<DiversityScore> {
    let n = m.n();
    if p.len() != n {
        return Err(WsceError::Contract(format!(
            "partition covers {} instances but the modular graph has {n}",
            p.len()
        )));
    }
    if m.nonzero_cells == 0 || m.z <= 0.0 {
        return Err(WsceError::Numeric("modular graph has no edges (z = 0)".into()));
    }
    let z = m.nonzero_cells as f64;

    // Observed: nonzero cells whose endpoints share a cluster.
    let mut within = 0usize;
    for j in 0..n {
        let cj = p.assign[j];
        for (i, &v) in m.m.column(j).iter().enumerate() {
            if v != 0.0 && p.assign[i] == cj {
                within += 1;
            }
        }
    }
    // Expected: Σ_c (Σ_{i∈c} σ_i)² / (2z).
    let mut cluster_degree = vec![0f64; p.l];
    for (i, &c) in p.assign.iter().enumerate() {
        cluster_degree[c] += m.degrees[i] as f64;
    }
    let expected: f64 = cluster_degree.iter().map(|s| s * s).sum::<f64>() / (2.0 * z);

    let raw = 0.5 + (within as f64 - expected) / (4.0 * z);
    let nm = raw.clamp(0.0, 1.0);
    if (nm - raw).abs() > 1e-9 {
        log::warn!("normalized modularity {raw} clamped to {nm}");
    }
    Ok(DiversityScore { nm, l: p.l })
}
