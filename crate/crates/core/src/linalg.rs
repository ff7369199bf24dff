//! Small complex linear-algebra helpers used throughout the pipeline.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

/// `(A + A^H) / 2`, killing accumulated round-off in matrices that are
/// Hermitian by construction.
pub fn hermitianize(a: &CMat) -> CMat {
    let ah = a.adjoint();
    (a + ah).map(|z| z * 0.5)
}

/// Hermitian eigendecomposition with eigenvalues sorted descending.
///
/// Returns `(eigenvalues, eigenvectors)` where column `i` of the
/// eigenvector matrix pairs with eigenvalue `i`.
pub fn eigh_desc(a: &CMat) -> (DVector<f64>, CMat) {
    let n = a.nrows();
    let se = hermitianize(a).symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| se.eigenvalues[j].partial_cmp(&se.eigenvalues[i]).unwrap());
    let vals = DVector::from_iterator(n, order.iter().map(|&i| se.eigenvalues[i]));
    let vecs = CMat::from_columns(
        &order
            .iter()
            .map(|&i| se.eigenvectors.column(i).into_owned())
            .collect::<Vec<_>>(),
    );
    (vals, vecs)
}

pub fn frob(a: &CMat) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Moore-Penrose pseudoinverse via SVD. Errors with the smallest/largest
/// singular-value ratio when the matrix is numerically rank-deficient
/// below `min_rank`.
pub fn pseudo_inverse_full_rank(a: &CMat, min_rank: usize) -> Result<CMat, (f64, f64)> {
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = if svd.singular_values.len() >= min_rank {
        svd.singular_values[min_rank - 1]
    } else {
        0.0
    };
    if smin < 1e-10 * smax {
        return Err((smin, smax));
    }
    Ok(svd.pseudo_inverse(1e-12 * smax).expect("svd computed with u/v"))
}
