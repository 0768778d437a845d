//! Labeled datasets: CSV ingestion, z-scoring, the half-ring generator and
//! controlled corruption (additive noise or mean-imputed missing cells).

use std::collections::HashMap;
use std::io::{Read, Write};
use std::path::Path;

use nalgebra::DMatrix;
use rand::seq::index;
use rand_distr::{Distribution, Normal, Uniform};
use serde::{Deserialize, Serialize};

use crate::error::{Result, WsceError};
use crate::rng::rng_from;

/// Feature matrix (one row per instance) with optional ground truth.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub name: String,
    pub features: DMatrix<f64>,
    pub feature_names: Vec<String>,
    pub labels: Option<Vec<usize>>,
    /// Original class names, indexed by encoded label.
    pub label_names: Option<Vec<String>>,
}

impl Dataset {
    pub fn new(
        name: impl Into<String>,
        features: DMatrix<f64>,
        labels: Option<Vec<usize>>,
    ) -> Result<Self> {
        let m = features.ncols();
        let feature_names = (0..m).map(|j| format!("f{}", j + 1)).collect();
        Self::with_names(name, features, feature_names, labels, None)
    }

    pub fn with_names(
        name: impl Into<String>,
        features: DMatrix<f64>,
        feature_names: Vec<String>,
        labels: Option<Vec<usize>>,
        label_names: Option<Vec<String>>,
    ) -> Result<Self> {
        let (n, m) = features.shape();
        if n < 2 {
            return Err(WsceError::Contract(format!("dataset needs at least 2 instances, got {n}")));
        }
        if m < 1 {
            return Err(WsceError::Contract("dataset needs at least 1 feature".into()));
        }
        if feature_names.len() != m {
            return Err(WsceError::Contract(format!(
                "{} feature names for {m} columns",
                feature_names.len()
            )));
        }
        if let Some(labels) = &labels {
            if labels.len() != n {
                return Err(WsceError::Contract(format!(
                    "{} labels for {n} instances",
                    labels.len()
                )));
            }
            let first = labels[0];
            if labels.iter().all(|&l| l == first) {
                return Err(WsceError::Contract(
                    "labels must contain at least 2 distinct classes".into(),
                ));
            }
        }
        Ok(Dataset {
            name: name.into(),
            features,
            feature_names,
            labels,
            label_names,
        })
    }

    pub fn n_instances(&self) -> usize {
        self.features.nrows()
    }

    pub fn n_features(&self) -> usize {
        self.features.ncols()
    }

    /// Number of distinct ground-truth classes, if labeled.
    pub fn n_classes(&self) -> Option<usize> {
        self.labels
            .as_ref()
            .map(|l| l.iter().copied().max().map_or(0, |x| x + 1))
    }

    fn replace_features(&self, features: DMatrix<f64>) -> Dataset {
        Dataset {
            features,
            ..self.clone()
        }
    }

    /// Write the dataset as CSV: header row, feature columns, then a `class`
    /// column when labels are present.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let mut header = self.feature_names.clone();
        if self.labels.is_some() {
            header.push("class".to_string());
        }
        w.write_record(&header)?;
        for i in 0..self.n_instances() {
            let mut record: Vec<String> = self.features.row(i).iter().map(|x| x.to_string()).collect();
            if let Some(labels) = &self.labels {
                let name = match &self.label_names {
                    Some(names) => names[labels[i]].clone(),
                    None => labels[i].to_string(),
                };
                record.push(name);
            }
            w.write_record(&record)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn save_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let file = std::fs::File::create(path)?;
        self.write_csv(std::io::BufWriter::new(file))
    }
}

/// Load a headed CSV file. Every column other than `label_column` must be numeric.
pub fn load_csv(path: impl AsRef<Path>, label_column: Option<&str>) -> Result<Dataset> {
    let path = path.as_ref();
    let file = std::fs::File::open(path)?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "dataset".into());
    read_csv(file, &name, label_column)
}

pub fn read_csv<R: Read>(reader: R, name: &str, label_column: Option<&str>) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    let label_idx = match label_column {
        Some(col) => Some(header.iter().position(|h| h == col).ok_or_else(|| {
            WsceError::Config(format!("label column '{col}' not found in header {header:?}"))
        })?),
        None => None,
    };
    let feature_cols: Vec<usize> = (0..header.len()).filter(|&j| Some(j) != label_idx).collect();

    let mut values = Vec::new();
    let mut raw_labels = Vec::new();
    let mut n = 0usize;
    for (r, record) in rdr.records().enumerate() {
        let record = record?;
        // Data rows start at file line 2.
        let line = r + 2;
        if record.len() != header.len() {
            return Err(WsceError::Input {
                row: line,
                column: String::new(),
                message: format!("expected {} fields, found {}", header.len(), record.len()),
            });
        }
        for &j in &feature_cols {
            let cell = &record[j];
            let v: f64 = cell.parse().map_err(|_| WsceError::Input {
                row: line,
                column: header[j].clone(),
                message: format!("cannot parse '{cell}' as a number"),
            })?;
            if !v.is_finite() {
                return Err(WsceError::Input {
                    row: line,
                    column: header[j].clone(),
                    message: format!("non-finite value '{cell}'"),
                });
            }
            values.push(v);
        }
        if let Some(li) = label_idx {
            raw_labels.push(record[li].to_string());
        }
        n += 1;
    }

    let features = DMatrix::from_row_slice(n, feature_cols.len(), &values);
    let feature_names = feature_cols.iter().map(|&j| header[j].clone()).collect();
    let (labels, label_names) = if label_idx.is_some() {
        let (codes, names) = encode_labels(&raw_labels);
        (Some(codes), Some(names))
    } else {
        (None, None)
    };
    Dataset::with_names(name, features, feature_names, labels, label_names)
}

/// Map arbitrary class names to 0.. in order of first appearance.
pub fn encode_labels(raw: &[String]) -> (Vec<usize>, Vec<String>) {
    let mut seen: HashMap<&str, usize> = HashMap::new();
    let mut names = Vec::new();
    let codes = raw
        .iter()
        .map(|s| {
            *seen.entry(s.as_str()).or_insert_with(|| {
                names.push(s.clone());
                names.len() - 1
            })
        })
        .collect();
    (codes, names)
}

/// Z-score every column with the population (1/n) standard deviation.
///
/// Constant columns become all-zero; their indices are returned and a warning
/// is logged.
pub fn normalize(ds: &Dataset) -> (Dataset, Vec<usize>) {
    let (n, m) = ds.features.shape();
    let mut out = ds.features.clone();
    let mut constant = Vec::new();
    for j in 0..m {
        let col = ds.features.column(j);
        let mean = col.sum() / n as f64;
        let var = col.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n as f64;
        let std = var.sqrt();
        if std <= 1e-12 * mean.abs().max(1.0) {
            constant.push(j);
            out.column_mut(j).fill(0.0);
        } else {
            out.column_mut(j).iter_mut().for_each(|x| *x = (*x - mean) / std);
        }
    }
    if !constant.is_empty() {
        log::warn!(
            "{}: {} constant column(s) mapped to zero: {:?}",
            ds.name,
            constant.len(),
            constant
        );
    }
    (ds.replace_features(out), constant)
}

/// Two interleaved half-moons in 2-D.
///
/// The upper arc is the unit semicircle centered at the origin; the lower arc
/// is the same semicircle flipped and shifted by (1, 0.5). Labels are the arc
/// index. Odd `n` is reduced to `n - 1`.
pub fn make_half_ring(n: usize, noise_std: f64, seed: u64) -> Result<Dataset> {
    if n < 4 {
        return Err(WsceError::Config(format!("half-ring needs n >= 4, got {n}")));
    }
    if !(noise_std >= 0.0 && noise_std.is_finite()) {
        return Err(WsceError::Config(format!("noise_std must be finite and >= 0, got {noise_std}")));
    }
    let n = if n % 2 == 1 {
        log::warn!("half-ring: odd n={n} adjusted to {}", n - 1);
        n - 1
    } else {
        n
    };
    let half = n / 2;
    let mut rng = rng_from(seed);
    let angle = Uniform::new_inclusive(0.0, std::f64::consts::PI)
        .map_err(|e| WsceError::Config(e.to_string()))?;
    let mut features = DMatrix::zeros(n, 2);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let t: f64 = angle.sample(&mut rng);
        let (x, y) = if i < half {
            (t.cos(), t.sin())
        } else {
            (1.0 - t.cos(), 0.5 - t.sin())
        };
        features[(i, 0)] = x;
        features[(i, 1)] = y;
        labels.push(usize::from(i >= half));
    }
    if noise_std > 0.0 {
        let jitter = Normal::new(0.0, noise_std).map_err(|e| WsceError::Config(e.to_string()))?;
        features.iter_mut().for_each(|v| *v += jitter.sample(&mut rng));
    }
    Dataset::with_names(
        "half-ring",
        features,
        vec!["x".into(), "y".into()],
        Some(labels),
        Some(vec!["upper".into(), "lower".into()]),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CorruptionKind {
    Noise,
    Missing,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorruptionSpec {
    pub kind: CorruptionKind,
    /// Fraction of the n·m feature cells to corrupt.
    pub rate: f64,
    pub seed: u64,
}

/// A corrupted copy of a dataset plus the cells that were touched, as
/// (row, column) pairs in row-major order.
#[derive(Debug, Clone)]
pub struct Corrupted {
    pub dataset: Dataset,
    pub mask: Vec<(usize, usize)>,
}

impl Corrupted {
    pub fn write_mask_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["row", "col"])?;
        for &(r, c) in &self.mask {
            w.write_record([r.to_string(), c.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Number of cells selected for a given rate: ⌊rate·cells⌋, with a small
/// slack so that e.g. 0.29·100 counts as 29.
pub fn corrupted_cell_count(rate: f64, cells: usize) -> usize {
    ((rate * cells as f64) + 1e-9).floor().min(cells as f64) as usize
}

pub fn corrupt(ds: &Dataset, spec: &CorruptionSpec) -> Result<Corrupted> {
    if !(0.0..=1.0).contains(&spec.rate) {
        return Err(WsceError::Config(format!(
            "corruption rate must lie in [0, 1], got {}",
            spec.rate
        )));
    }
    let (n, m) = ds.features.shape();
    let cells = n * m;
    let count = corrupted_cell_count(spec.rate, cells);
    if count == 0 {
        return Ok(Corrupted {
            dataset: ds.clone(),
            mask: Vec::new(),
        });
    }

    let mut rng = rng_from(spec.seed);
    let mut chosen = index::sample(&mut rng, cells, count).into_vec();
    chosen.sort_unstable();
    let mask: Vec<(usize, usize)> = chosen.iter().map(|&c| (c / m, c % m)).collect();

    let mut features = ds.features.clone();
    match spec.kind {
        CorruptionKind::Noise => {
            let unit = Normal::new(0.0, 1.0).expect("unit normal");
            for &(r, c) in &mask {
                features[(r, c)] += unit.sample(&mut rng);
            }
        }
        CorruptionKind::Missing => {
            let means: Vec<f64> = (0..m).map(|j| ds.features.column(j).mean()).collect();
            for &(r, c) in &mask {
                features[(r, c)] = means[c];
            }
        }
    }
    Ok(Corrupted {
        dataset: ds.replace_features(features),
        mask,
    })
}
