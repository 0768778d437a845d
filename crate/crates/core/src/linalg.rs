//! Dense symmetric eigensolver wrapper with deterministic ordering and signs.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Result, WsceError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Order {
    Ascending,
    Descending,
}

/// Eigenpairs of a symmetric matrix, columns of `vectors` matching `values`.
#[derive(Debug, Clone)]
pub struct SortedEigen {
    pub values: DVector<f64>,
    pub vectors: DMatrix<f64>,
}

/// Flip `v` so that its largest-magnitude entry (first one on ties) is positive.
pub fn fix_sign(mut v: nalgebra::DVectorViewMut<'_, f64>) {
    let mut best = 0usize;
    let mut best_abs = f64::NEG_INFINITY;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > best_abs {
            best_abs = x.abs();
            best = i;
        }
    }
    if v.len() > 0 && v[best] < 0.0 {
        v.neg_mut();
    }
}

/// Symmetrize, solve, sort by eigenvalue (ties keep solver index order) and
/// sign-fix every eigenvector.
pub fn sym_eigen(matrix: &DMatrix<f64>, order: Order) -> Result<SortedEigen> {
    let n = matrix.nrows();
    if n != matrix.ncols() {
        return Err(WsceError::Contract(format!(
            "eigensolve needs a square matrix, got {}x{}",
            n,
            matrix.ncols()
        )));
    }
    if matrix.iter().any(|x| !x.is_finite()) {
        return Err(WsceError::Numeric(
            "matrix handed to the eigensolver has non-finite entries".into(),
        ));
    }
    let sym = (matrix + matrix.transpose()) * 0.5;
    let eig = SymmetricEigen::try_new(sym, f64::EPSILON, 10_000).ok_or_else(|| {
        let norm = matrix.norm();
        WsceError::Numeric(format!(
            "symmetric eigensolver did not converge (n={n}, frobenius norm={norm:.6e}, max |entry|={:.6e})",
            matrix.amax()
        ))
    })?;

    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| {
        let (x, y) = (eig.eigenvalues[a], eig.eigenvalues[b]);
        let ord = match order {
            Order::Ascending => x.total_cmp(&y),
            Order::Descending => y.total_cmp(&x),
        };
        ord.then(a.cmp(&b))
    });

    let values = DVector::from_iterator(n, idx.iter().map(|&i| eig.eigenvalues[i]));
    let mut vectors = DMatrix::zeros(n, n);
    for (dst, &src) in idx.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
        fix_sign(vectors.column_mut(dst));
    }
    Ok(SortedEigen { values, vectors })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sorts_and_fixes_sign() {
        let m = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 2.0]);
        let asc = sym_eigen(&m, Order::Ascending).unwrap();
        assert!((asc.values[0] - 1.0).abs() < 1e-12);
        assert!((asc.values[1] - 3.0).abs() < 1e-12);
        let desc = sym_eigen(&m, Order::Descending).unwrap();
        assert!((desc.values[0] - 3.0).abs() < 1e-12);
        assert!(desc.vectors.column(0).iter().all(|&x| x > 0.0));
    }

    #[test]
    fn rejects_non_finite() {
        let m = DMatrix::from_row_slice(2, 2, &[f64::NAN, 0.0, 0.0, 1.0]);
        assert!(matches!(sym_eigen(&m, Order::Ascending), Err(WsceError::Numeric(_))));
    }
}
