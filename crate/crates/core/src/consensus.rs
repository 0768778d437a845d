//! Evidence accumulation consensus: (weighted) co-association matrices and an
//! average-linkage dendrogram cut.

use std::io::Write;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Result, WsceError};
use crate::kmeans::PartitionalResult;

/// One base partition and its diversity weight.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleMember {
    pub partition: PartitionalResult,
    pub weight: f64,
}

impl EnsembleMember {
    pub fn new(partition: PartitionalResult, weight: f64) -> Result<Self> {
        if !(weight.is_finite() && (0.0..=1.0).contains(&weight)) {
            return Err(WsceError::Contract(format!("member weight {weight} outside [0, 1]")));
        }
        Ok(EnsembleMember { partition, weight })
    }
}

/// Symmetric pairwise co-clustering evidence.
#[derive(Debug, Clone, PartialEq)]
pub struct CoAssociationMatrix {
    pub xi: DMatrix<f64>,
}

impl CoAssociationMatrix {
    pub fn n(&self) -> usize {
        self.xi.nrows()
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(writer);
        for row in self.xi.row_iter() {
            w.write_record(row.iter().map(|x| x.to_string()))?;
        }
        w.flush()?;
        Ok(())
    }
}

fn accumulate(members: &[EnsembleMember], weighted: bool) -> Result<CoAssociationMatrix> {
    let first = members
        .first()
        .ok_or_else(|| WsceError::Contract("ensemble has no members".into()))?;
    let n = first.partition.len();
    if let Some(bad) = members.iter().find(|m| m.partition.len() != n) {
        return Err(WsceError::Contract(format!(
            "member partitions disagree on n ({} vs {n})",
            bad.partition.len()
        )));
    }
    let mut xi = DMatrix::zeros(n, n);
    for member in members {
        let w = if weighted { member.weight } else { 1.0 };
        let mut groups: Vec<Vec<usize>> = vec![Vec::new(); member.partition.l];
        for (i, &c) in member.partition.assign.iter().enumerate() {
            groups[c].push(i);
        }
        for g in &groups {
            for &i in g {
                for &j in g {
                    xi[(i, j)] += w;
                }
            }
        }
    }
    // Every member covers every instance, so each pair is present in all of them.
    let presence = members.len() as f64;
    xi /= presence;
    Ok(CoAssociationMatrix { xi })
}

/// Weighted evidence accumulation: a pair's entry is the sum of the weights of
/// the members that co-cluster it, over the number of members.
pub fn weac(members: &[EnsembleMember]) -> Result<CoAssociationMatrix> {
    accumulate(members, true)
}

/// Plain evidence accumulation: co-clustering frequency, weights ignored.
pub fn eac(members: &[EnsembleMember]) -> Result<CoAssociationMatrix> {
    accumulate(members, false)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Merge {
    pub step: usize,
    /// Cluster ids: leaves are 0..n, the cluster formed at step s is n + s.
    pub left: usize,
    pub right: usize,
    pub height: f64,
    pub size: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dendrogram {
    pub n: usize,
    pub merges: Vec<Merge>,
}

impl Dendrogram {
    /// Apply the first n − k merges and label the resulting clusters in order
    /// of their smallest member.
    pub fn cut(&self, k: usize) -> Result<PartitionalResult> {
        if k < 1 || k > self.n {
            return Err(WsceError::Config(format!(
                "cannot cut {} leaves into k={k} clusters",
                self.n
            )));
        }
        let mut parent: Vec<usize> = (0..self.n + self.merges.len()).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for merge in self.merges.iter().take(self.n - k) {
            let id = self.n + merge.step;
            parent[merge.left] = id;
            parent[merge.right] = id;
        }
        let roots: Vec<usize> = (0..self.n).map(|i| find(&mut parent, i)).collect();
        Ok(PartitionalResult::from_labels(&roots))
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["step", "left", "right", "height"])?;
        for m in &self.merges {
            w.write_record([
                m.step.to_string(),
                m.left.to_string(),
                m.right.to_string(),
                m.height.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// UPGMA over an arbitrary symmetric dissimilarity matrix.
///
/// Clusters live in slots indexed by their smallest leaf; a merge keeps the
/// lower slot. Equal minimum dissimilarities go to the lexicographically
/// smallest slot pair.
pub fn upgma(dissimilarity: &DMatrix<f64>) -> Result<Dendrogram> {
    let n = dissimilarity.nrows();
    if dissimilarity.ncols() != n || n == 0 {
        return Err(WsceError::Contract(format!(
            "dissimilarity matrix is {}x{}",
            n,
            dissimilarity.ncols()
        )));
    }
    let mut d = dissimilarity.clone();
    let mut active = vec![true; n];
    let mut size = vec![1usize; n];
    let mut id: Vec<usize> = (0..n).collect();
    let mut merges = Vec::with_capacity(n.saturating_sub(1));

    for step in 0..n.saturating_sub(1) {
        let mut best = (usize::MAX, usize::MAX);
        let mut best_d = f64::INFINITY;
        for i in 0..n {
            if !active[i] {
                continue;
            }
            for j in (i + 1)..n {
                if active[j] && d[(i, j)] < best_d {
                    best_d = d[(i, j)];
                    best = (i, j);
                }
            }
        }
        let (i, j) = best;
        if i == usize::MAX {
            return Err(WsceError::Numeric("dissimilarities are not comparable (NaN)".into()));
        }
        let (si, sj) = (size[i] as f64, size[j] as f64);
        for k in 0..n {
            if active[k] && k != i && k != j {
                let v = (si * d[(i, k)] + sj * d[(j, k)]) / (si + sj);
                d[(i, k)] = v;
                d[(k, i)] = v;
            }
        }
        merges.push(Merge {
            step,
            left: id[i],
            right: id[j],
            height: best_d,
            size: size[i] + size[j],
        });
        active[j] = false;
        size[i] += size[j];
        id[i] = n + step;
    }
    Ok(Dendrogram { n, merges })
}

/// max(ξ) − ξ, so the strongest evidence becomes distance zero.
pub fn dissimilarity(xi: &CoAssociationMatrix) -> DMatrix<f64> {
    let max = xi.xi.max();
    let mut d = xi.xi.map(|v| max - v);
    d.fill_diagonal(0.0);
    d
}

pub fn average_linkage(xi: &CoAssociationMatrix) -> Result<Dendrogram> {
    upgma(&dissimilarity(xi))
}

pub fn average_linkage_cut(xi: &CoAssociationMatrix, k: usize) -> Result<PartitionalResult> {
    let n = xi.n();
    if k < 2 || k > n {
        return Err(WsceError::Config(format!("final cut needs 2 <= k <= n (k={k}, n={n})")));
    }
    average_linkage(xi)?.cut(k)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn member(assign: &[usize], weight: f64) -> EnsembleMember {
        EnsembleMember::new(PartitionalResult::from_labels(assign), weight).unwrap()
    }

    #[test]
    fn weighted_pair_average() {
        let members = [member(&[0, 0, 1], 0.8), member(&[0, 0, 1], 0.4)];
        let xi = weac(&members).unwrap();
        assert!((xi.xi[(0, 1)] - 0.6).abs() < 1e-15);
        assert_eq!(xi.xi[(0, 2)], 0.0);
        assert!((xi.xi[(2, 2)] - 0.6).abs() < 1e-15);
    }

    #[test]
    fn two_of_three() {
        let members = [member(&[0, 0, 1], 0.1), member(&[0, 0, 1], 0.2), member(&[0, 1, 1], 0.3)];
        let xi = eac(&members).unwrap();
        assert!((xi.xi[(0, 1)] - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn single_member_eac_is_co_membership() {
        let xi = eac(&[member(&[0, 1, 0, 1], 0.5)]).unwrap();
        let expected = DMatrix::from_fn(4, 4, |i, j| if i % 2 == j % 2 { 1.0 } else { 0.0 });
        assert_eq!(xi.xi, expected);
    }

    #[test]
    fn constant_weight_scales_eac() {
        let members = [member(&[0, 0, 1, 1], 0.3), member(&[0, 1, 1, 0], 0.3)];
        let w = weac(&members).unwrap().xi;
        let e = eac(&members).unwrap().xi;
        assert!((w - e * 0.3).amax() < 1e-15);
    }

    #[test]
    fn rejects_bad_members() {
        assert!(weac(&[]).is_err());
        let mixed = [member(&[0, 1], 0.5), member(&[0, 1, 1], 0.5)];
        assert!(matches!(weac(&mixed), Err(WsceError::Contract(_))));
        assert!(EnsembleMember::new(PartitionalResult::from_labels(&[0, 1]), 1.5).is_err());
        assert!(EnsembleMember::new(PartitionalResult::from_labels(&[0, 1]), f64::NAN).is_err());
    }

    #[test]
    fn block_diagonal_recovered() {
        let xi = CoAssociationMatrix {
            xi: DMatrix::from_fn(6, 6, |i, j| if (i < 3) == (j < 3) { 0.9 } else { 0.0 }),
        };
        let p = average_linkage_cut(&xi, 2).unwrap();
        assert_eq!(p.assign, vec![0, 0, 0, 1, 1, 1]);
    }

    #[test]
    fn k_equals_n_gives_singletons() {
        let xi = CoAssociationMatrix { xi: DMatrix::from_element(4, 4, 0.5) };
        assert_eq!(average_linkage_cut(&xi, 4).unwrap().assign, vec![0, 1, 2, 3]);
        assert!(matches!(average_linkage_cut(&xi, 5), Err(WsceError::Config(_))));
    }

    #[test]
    fn ties_merge_lowest_pair_first() {
        let d = DMatrix::from_element(3, 3, 1.0) - DMatrix::identity(3, 3);
        let dendro = upgma(&d).unwrap();
        assert_eq!((dendro.merges[0].left, dendro.merges[0].right), (0, 1));
        assert_eq!((dendro.merges[1].left, dendro.merges[1].right), (3, 2));
    }

    #[test]
    fn merge_list_csv() {
        let xi = CoAssociationMatrix {
            xi: DMatrix::from_row_slice(3, 3, &[1.0, 0.8, 0.1, 0.8, 1.0, 0.2, 0.1, 0.2, 1.0]),
        };
        let mut buf = Vec::new();
        average_linkage(&xi).unwrap().write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "step,left,right,height");
        assert!(lines[1].starts_with("0,0,1,"));
        assert!(lines[2].starts_with("1,3,2,"));
    }
}
