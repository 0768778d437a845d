use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dataset::{load_csv, make_half_ring, CorruptionSpec, Dataset};
use crate::decorrelate::FeatureSelection;
use crate::error::{Result, WsceError};
use crate::graph::AffinityExponent;

pub const DEFAULT_ENSEMBLE_SIZE: usize = 20;
pub const DEFAULT_REPEATS: usize = 10;
pub const DEFAULT_HALF_RING_N: usize = 400;
pub const DEFAULT_HALF_RING_NOISE: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Modularity-weighted evidence accumulation over the spectral ensemble.
    Wsce,
    /// Unweighted evidence accumulation over the same ensemble.
    EacSpectral,
    /// One spectral partition at l = k.
    Spectral,
}

impl Method {
    pub fn is_ensemble(self) -> bool {
        !matches!(self, Method::Spectral)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Wsce => "wsce",
            Method::EacSpectral => "eac_spectral",
            Method::Spectral => "spectral",
        })
    }
}

impl FromStr for Method {
    type Err = WsceError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "wsce" => Ok(Method::Wsce),
            "eac_spectral" | "eac-spectral" | "eac" => Ok(Method::EacSpectral),
            "spectral" => Ok(Method::Spectral),
            other => Err(WsceError::Config(format!(
                "unknown method '{other}' (expected wsce, eac_spectral or spectral)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DataSource {
    Csv { path: PathBuf, label: Option<String> },
    /// Generated from the run's master seed.
    HalfRing { n: usize, noise_std: f64 },
}

impl DataSource {
    /// `half-ring`, `half-ring:N` or `half-ring:N:NOISE` select the generator;
    /// anything else is a CSV path.
    pub fn parse(spec: &str, label: Option<String>) -> Result<Self> {
        let mut parts = spec.split(':');
        if parts.next() == Some("half-ring") {
            let n = match parts.next() {
                Some(s) => s
                    .parse()
                    .map_err(|_| WsceError::Config(format!("bad half-ring size '{s}'")))?,
                None => DEFAULT_HALF_RING_N,
            };
            let noise_std = match parts.next() {
                Some(s) => s
                    .parse()
                    .map_err(|_| WsceError::Config(format!("bad half-ring noise '{s}'")))?,
                None => DEFAULT_HALF_RING_NOISE,
            };
            return Ok(DataSource::HalfRing { n, noise_std });
        }
        Ok(DataSource::Csv {
            path: PathBuf::from(spec),
            label,
        })
    }

    pub fn load(&self, seed: u64) -> Result<Dataset> {
        match self {
            DataSource::Csv { path, label } => load_csv(path, label.as_deref()),
            DataSource::HalfRing { n, noise_std } => make_half_ring(*n, *noise_std, seed),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub data: DataSource,
    /// Final cluster count.
    pub k: usize,
    pub features: FeatureSelection,
    /// Neighbors per node; `None` uses max(7, ⌈log₂ n⌉).
    pub knn: Option<usize>,
    pub exponent: AffinityExponent,
    pub ensemble_size: usize,
    pub repeats: usize,
    pub seed: u64,
    pub method: Method,
    pub corruption: Option<CorruptionSpec>,
}

impl RunConfig {
    pub fn new(data: DataSource, k: usize) -> Self {
        RunConfig {
            data,
            k,
            features: FeatureSelection::default(),
            knn: None,
            exponent: AffinityExponent::default(),
            ensemble_size: DEFAULT_ENSEMBLE_SIZE,
            repeats: DEFAULT_REPEATS,
            seed: 0,
            method: Method::Wsce,
            corruption: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k < 2 {
            return Err(WsceError::Config(format!("k must be >= 2, got {}", self.k)));
        }
        if self.ensemble_size < self.k + 1 {
            return Err(WsceError::Config(format!(
                "ensemble size {} is below k + 1 = {}",
                self.ensemble_size,
                self.k + 1
            )));
        }
        if self.repeats < 1 {
            return Err(WsceError::Config("repeats must be >= 1".into()));
        }
        if let Some(c) = &self.corruption {
            if !(0.0..=1.0).contains(&c.rate) {
                return Err(WsceError::Config(format!(
                    "corruption rate must lie in [0, 1], got {}",
                    c.rate
                )));
            }
        }
        Ok(())
    }
}
