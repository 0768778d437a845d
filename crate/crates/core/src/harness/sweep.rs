use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::config::{Method, RunConfig};
use super::manifest::RunManifest;
use super::{load_dataset, run_on, RunOptions};
use crate::dataset::{CorruptionKind, CorruptionSpec};
use crate::decorrelate::FeatureSelection;
use crate::error::{Result, WsceError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    Noise,
    Missing,
    DFrac,
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SweepAxis::Noise => "noise",
            SweepAxis::Missing => "missing",
            SweepAxis::DFrac => "d_frac",
        })
    }
}

impl FromStr for SweepAxis {
    type Err = WsceError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "noise" => Ok(SweepAxis::Noise),
            "missing" => Ok(SweepAxis::Missing),
            "d_frac" | "d-frac" => Ok(SweepAxis::DFrac),
            other => Err(WsceError::Config(format!(
                "unknown sweep axis '{other}' (expected noise, missing or d_frac)"
            ))),
        }
    }
}

/// One (value, method) cell of a sweep grid. Exactly one of `manifest` and
/// `error` is set.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepCell {
    pub value: f64,
    pub method: Method,
    pub manifest: Option<RunManifest>,
    pub error: Option<String>,
}

impl SweepCell {
    pub fn mean_std(&self) -> (f64, f64) {
        match &self.manifest {
            Some(m) => (
                m.mean_accuracy.unwrap_or(f64::NAN),
                m.std_accuracy.unwrap_or(f64::NAN),
            ),
            None => (f64::NAN, f64::NAN),
        }
    }
}

fn check_values(axis: SweepAxis, values: &[f64]) -> Result<()> {
    if values.is_empty() {
        return Err(WsceError::Config("sweep needs at least one value".into()));
    }
    if values.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(WsceError::Config(format!("sweep values must be strictly ascending: {values:?}")));
    }
    let ok = |v: f64| match axis {
        SweepAxis::Noise | SweepAxis::Missing => (0.0..=1.0).contains(&v),
        SweepAxis::DFrac => v > 0.0 && v <= 1.0,
    };
    if let Some(bad) = values.iter().find(|&&v| !ok(v)) {
        return Err(WsceError::Config(format!("{axis} value {bad} out of range")));
    }
    Ok(())
}

fn cell_config(base: &RunConfig, axis: SweepAxis, value: f64, method: Method) -> RunConfig {
    let mut cfg = RunConfig {
        method,
        ..base.clone()
    };
    let corruption_seed = base.corruption.map_or(base.seed, |c| c.seed);
    match axis {
        SweepAxis::Noise | SweepAxis::Missing => {
            let kind = if axis == SweepAxis::Noise {
                CorruptionKind::Noise
            } else {
                CorruptionKind::Missing
            };
            cfg.corruption = Some(CorruptionSpec {
                kind,
                rate: value,
                seed: corruption_seed,
            });
        }
        SweepAxis::DFrac => cfg.features = FeatureSelection::Fraction(value),
    }
    cfg
}

/// One full run per (value, method) with the base seed everywhere, so cells
/// are paired. A failing cell is recorded and the grid continues.
pub fn run_sweep(
    base: &RunConfig,
    axis: SweepAxis,
    values: &[f64],
    methods: &[Method],
) -> Result<Vec<SweepCell>> {
    check_values(axis, values)?;
    if methods.is_empty() {
        return Err(WsceError::Config("sweep needs at least one method".into()));
    }
    let ds = load_dataset(base)?;
    let mut cells = Vec::with_capacity(values.len() * methods.len());
    for &value in values {
        for &method in methods {
            let cfg = cell_config(base, axis, value, method);
            let cell = match run_on(&cfg, &ds, &RunOptions::default()) {
                Ok(manifest) => SweepCell {
                    value,
                    method,
                    manifest: Some(manifest),
                    error: None,
                },
                Err(e) => {
                    log::error!("sweep cell {axis}={value} method={method} failed: {e}");
                    SweepCell {
                        value,
                        method,
                        manifest: None,
                        error: Some(e.to_string()),
                    }
                }
            };
            cells.push(cell);
        }
    }
    Ok(cells)
}

/// `value,method,mean_accuracy,std_accuracy`; failed cells carry NaN.
pub fn write_sweep_csv<W: Write>(cells: &[SweepCell], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["value", "method", "mean_accuracy", "std_accuracy"])?;
    for cell in cells {
        let (mean, std) = cell.mean_std();
        w.write_record([
            cell.value.to_string(),
            cell.method.to_string(),
            mean.to_string(),
            std.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
