use serde::{Deserialize, Serialize};

use super::config::RunConfig;
use crate::error::Result;
use crate::evaluation::AccuracyReport;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetInfo {
    pub name: String,
    pub n: usize,
    pub m: usize,
    pub classes: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MemberRecord {
    pub index: usize,
    pub l: usize,
    pub seed: u64,
    pub nm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepeatRecord {
    pub repeat: usize,
    pub retained_features: usize,
    pub knn: usize,
    pub corrupted_cells: usize,
    /// SHA-256 of the modular graph, shared by every member of this repeat.
    pub modular_fingerprint: Option<String>,
    pub members: Vec<MemberRecord>,
    pub assignment: Vec<usize>,
    pub accuracy: Option<AccuracyReport>,
}

/// Wall-clock seconds per stage for one repeat.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct StageTimings {
    pub prepare: f64,
    pub decorrelate: f64,
    pub graph: f64,
    pub kernels: f64,
    pub members: f64,
    pub consensus: f64,
    pub total: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub config: RunConfig,
    pub dataset: DatasetInfo,
    pub repeats: Vec<RepeatRecord>,
    pub accuracies: Vec<f64>,
    pub mean_accuracy: Option<f64>,
    /// Sample (n − 1) standard deviation; 0 for a single repeat.
    pub std_accuracy: Option<f64>,
    pub timings: Vec<StageTimings>,
}

/// Mean and sample standard deviation.
pub fn mean_std(values: &[f64]) -> Option<(f64, f64)> {
    if values.is_empty() {
        return None;
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let std = if values.len() > 1 {
        (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    Some((mean, std))
}

impl RunManifest {
    /// Copy with all wall-clock fields zeroed.
    pub fn without_timings(&self) -> RunManifest {
        RunManifest {
            timings: vec![StageTimings::default(); self.timings.len()],
            ..self.clone()
        }
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| crate::error::WsceError::Config(e.to_string()))
    }

    /// JSON with timings zeroed; identical configs give identical bytes.
    pub fn to_canonical_json(&self) -> Result<String> {
        self.without_timings().to_json()
    }

    pub fn member_count(&self) -> usize {
        self.repeats.first().map_or(0, |r| r.members.len())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mean_std_values() {
        assert_eq!(mean_std(&[]), None);
        assert_eq!(mean_std(&[0.5]), Some((0.5, 0.0)));
        let (m, s) = mean_std(&[1.0, 2.0, 3.0]).unwrap();
        assert!((m - 2.0).abs() < 1e-15);
        assert!((s - 1.0).abs() < 1e-15);
    }
}
