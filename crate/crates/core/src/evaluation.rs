//! Clustering accuracy under the best one-to-one cluster→class relabeling.

use serde::{Deserialize, Serialize};

use crate::error::{Result, WsceError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AccuracyReport {
    pub accuracy: f64,
    pub matched: usize,
    pub n: usize,
    /// (predicted cluster id, true class id) pairs of the optimal matching.
    pub mapping: Vec<(usize, usize)>,
    /// Sorted distinct predicted ids (rows of `confusion`).
    pub pred_ids: Vec<usize>,
    /// Sorted distinct true ids (columns of `confusion`).
    pub true_ids: Vec<usize>,
    pub confusion: Vec<Vec<usize>>,
}

fn compact(labels: &[usize]) -> (Vec<usize>, Vec<usize>) {
    let mut ids: Vec<usize> = labels.to_vec();
    ids.sort_unstable();
    ids.dedup();
    let codes = labels
        .iter()
        .map(|x| ids.binary_search(x).expect("present"))
        .collect();
    (codes, ids)
}

/// Minimum-cost perfect assignment on a square cost matrix (Hungarian method
/// with row/column potentials). Returns `col_of_row`.
pub fn min_cost_assignment(cost: &[Vec<i64>]) -> Vec<usize> {
    let n = cost.len();
    if n == 0 {
        return Vec::new();
    }
    const INF: i64 = i64::MAX / 4;
    // 1-based arrays; index 0 is the virtual start column.
    let mut u = vec![0i64; n + 1];
    let mut v = vec![0i64; n + 1];
    let mut row_of_col = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for row in 1..=n {
        row_of_col[0] = row;
        let mut col0 = 0usize;
        let mut minv = vec![INF; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[col0] = true;
            let r = row_of_col[col0];
            let mut delta = INF;
            let mut col1 = 0usize;
            for c in 1..=n {
                if !used[c] {
                    let cur = cost[r - 1][c - 1] - u[r] - v[c];
                    if cur < minv[c] {
                        minv[c] = cur;
                        way[c] = col0;
                    }
                    if minv[c] < delta {
                        delta = minv[c];
                        col1 = c;
                    }
                }
            }
            for c in 0..=n {
                if used[c] {
                    u[row_of_col[c]] += delta;
                    v[c] -= delta;
                } else {
                    minv[c] -= delta;
                }
            }
            col0 = col1;
            if row_of_col[col0] == 0 {
                break;
            }
        }
        loop {
            let col1 = way[col0];
            row_of_col[col0] = row_of_col[col1];
            col0 = col1;
            if col0 == 0 {
                break;
            }
        }
    }
    let mut col_of_row = vec![0usize; n];
    for c in 1..=n {
        col_of_row[row_of_col[c] - 1] = c - 1;
    }
    col_of_row
}

pub fn accuracy(pred: &[usize], truth: &[usize]) -> Result<AccuracyReport> {
    if pred.len() != truth.len() {
        return Err(WsceError::Contract(format!(
            "prediction has {} entries, ground truth {}",
            pred.len(),
            truth.len()
        )));
    }
    if pred.is_empty() {
        return Err(WsceError::Contract("accuracy of an empty labeling".into()));
    }
    let (p, pred_ids) = compact(pred);
    let (t, true_ids) = compact(truth);
    let (kp, kt) = (pred_ids.len(), true_ids.len());
    let mut confusion = vec![vec![0usize; kt]; kp];
    for (&a, &b) in p.iter().zip(&t) {
        confusion[a][b] += 1;
    }

    let size = kp.max(kt);
    let n = pred.len() as i64;
    let cost: Vec<Vec<i64>> = (0..size)
        .map(|r| {
            (0..size)
                .map(|c| {
                    let count = if r < kp && c < kt { confusion[r][c] as i64 } else { 0 };
                    n - count
                })
                .collect()
        })
        .collect();
    let col_of_row = min_cost_assignment(&cost);

    let mut mapping = Vec::new();
    let mut matched = 0;
    for (r, &c) in col_of_row.iter().enumerate() {
        if r < kp && c < kt {
            matched += confusion[r][c];
            mapping.push((pred_ids[r], true_ids[c]));
        }
    }
    Ok(AccuracyReport {
        accuracy: matched as f64 / pred.len() as f64,
        matched,
        n: pred.len(),
        mapping,
        pred_ids,
        true_ids,
        confusion,
    })
}
