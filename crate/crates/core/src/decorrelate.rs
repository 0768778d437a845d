//! Decorrelating map: center the features, eigendecompose their covariance and
//! project onto the leading eigenvectors.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Result, WsceError};
use crate::linalg::{sym_eigen, Order};

/// Eigenvectors of the feature covariance, sorted by descending eigenvalue.
#[derive(Debug, Clone)]
pub struct EigenBasis {
    /// m × d_eff, one eigenvector per column.
    pub q: DMatrix<f64>,
    /// All m eigenvalues, non-increasing.
    pub lambda: DVector<f64>,
    /// Requested retained-feature count; 0 keeps everything.
    pub d: usize,
}

#[derive(Debug, Clone)]
pub struct MappedData {
    /// d_eff × n; column i is instance i in the decorrelated coordinates.
    pub y: DMatrix<f64>,
    pub basis: EigenBasis,
    /// Per-feature mean that was subtracted.
    pub mean: DVector<f64>,
}

impl MappedData {
    pub fn n_instances(&self) -> usize {
        self.y.ncols()
    }

    pub fn dims(&self) -> usize {
        self.y.nrows()
    }

    /// Map back to the original feature space (n × m). Exact only when no
    /// directions were dropped.
    pub fn reconstruct(&self) -> DMatrix<f64> {
        let mut x = (&self.basis.q * &self.y).transpose();
        for mut row in x.row_iter_mut() {
            row += self.mean.transpose();
        }
        x
    }
}

/// Retained-feature count selection.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureSelection {
    /// Keep this many leading directions; 0 keeps all.
    Count(usize),
    /// Keep round(frac·m) directions, at least one.
    Fraction(f64),
}

impl Default for FeatureSelection {
    fn default() -> Self {
        FeatureSelection::Count(0)
    }
}

impl FeatureSelection {
    pub fn resolve(self, m: usize) -> Result<usize> {
        match self {
            FeatureSelection::Count(d) => Ok(d),
            FeatureSelection::Fraction(f) => {
                if !(f > 0.0 && f <= 1.0) {
                    return Err(WsceError::Config(format!("d-frac must lie in (0, 1], got {f}")));
                }
                Ok(((f * m as f64).round() as usize).clamp(1, m))
            }
        }
    }
}

/// Population covariance (1/n) of the rows of a centered n × m matrix.
pub fn covariance(centered: &DMatrix<f64>) -> DMatrix<f64> {
    let n = centered.nrows() as f64;
    let r = centered.transpose() * centered / n;
    (&r + r.transpose()) * 0.5
}

pub fn fit_map(ds: &Dataset, d: usize) -> Result<MappedData> {
    let (n, m) = ds.features.shape();
    if d > m {
        return Err(WsceError::Config(format!(
            "cannot retain d={d} features out of m={m}"
        )));
    }
    if n < 2 {
        return Err(WsceError::Contract(format!("decorrelation needs n >= 2, got {n}")));
    }
    let mean = DVector::from_iterator(m, (0..m).map(|j| ds.features.column(j).mean()));
    let mut centered = ds.features.clone();
    for mut row in centered.row_iter_mut() {
        row -= mean.transpose();
    }
    let r = covariance(&centered);
    let eig = sym_eigen(&r, Order::Descending)?;
    let keep = if d == 0 { m } else { d };
    let q = eig.vectors.columns(0, keep).into_owned();
    let y = q.transpose() * centered.transpose();
    Ok(MappedData {
        y,
        basis: EigenBasis {
            q,
            lambda: eig.values,
            d,
        },
        mean,
    })
}
