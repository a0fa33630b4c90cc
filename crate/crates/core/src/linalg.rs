//! Small dense linear-algebra helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::C64;

/// Entrywise symmetry check with tolerance relative to the largest entry.
pub fn is_symmetric(a: &DMatrix<f64>, rel_tol: f64) -> bool {
    if !a.is_square() {
        return false;
    }
    let scale = a.amax().max(f64::MIN_POSITIVE);
    let n = a.nrows();
    (0..n).all(|i| (0..i).all(|j| (a[(i, j)] - a[(j, i)]).abs() <= rel_tol * scale))
}

/// Eigen-decomposition of a symmetric matrix with eigenvalues ascending and
/// eigenvectors in the matching columns.
pub fn sym_eigen_sorted(a: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let sym = (a + a.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(a.nrows(), a.ncols(), |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

pub fn sym_eigenvalues(a: &DMatrix<f64>) -> Vec<f64> {
    sym_eigen_sorted(a).0
}

pub fn is_positive_definite(a: &DMatrix<f64>) -> bool {
    is_symmetric(a, 1e-14) && sym_eigenvalues(a).first().is_some_and(|&l| l > 0.0)
}

/// Principal square root of a symmetric positive-definite matrix.
pub fn spd_sqrt(a: &DMatrix<f64>, context: &'static str) -> Result<DMatrix<f64>> {
    if !is_symmetric(a, 1e-12) {
        return Err(Error::NotPositiveDefinite { context });
    }
    let (vals, vecs) = sym_eigen_sorted(a);
    if vals.first().is_none_or(|&l| l <= 0.0) {
        return Err(Error::NotPositiveDefinite { context });
    }
    let root = DMatrix::from_diagonal(&DVector::from_iterator(vals.len(), vals.iter().map(|l| l.sqrt())));
    let k = &vecs * root * vecs.transpose();
    Ok((&k + k.transpose()) * 0.5)
}

pub fn to_complex(a: &DMatrix<f64>) -> DMatrix<C64> {
    a.map(|x| C64::new(x, 0.0))
}

pub fn vec_to_complex(v: &DVector<f64>) -> DVector<C64> {
    v.map(|x| C64::new(x, 0.0))
}

/// Largest singular value of `a⁻¹`, i.e. `1/σ_min(a)`.
pub fn inverse_norm(a: &DMatrix<C64>) -> f64 {
    let sv = a.clone().singular_values();
    let smin = sv.iter().copied().fold(f64::INFINITY, f64::min);
    1.0 / smin
}
