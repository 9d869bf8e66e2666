//! Dense linear algebra: the matrix type, Gram products, norms, trace,
//! symmetric eigendecomposition and nonnegative least squares.

mod eig;
mod matrix;
mod nnls;
mod solve;

pub use eig::{sym_eig, SymEigResult, SYMMETRY_TOL};
pub use matrix::DenseMatrix;
pub use nnls::{nnls, nnls_normal};
pub use solve::solve_spd;

pub(crate) use matrix::dot;

use crate::error::{Error, Result};

/// `X^T X`. Only the upper triangle is computed; the result is exactly
/// symmetric.
pub fn gram(x: &DenseMatrix) -> DenseMatrix {
    let xt = x.transpose();
    let n = x.cols();
    let mut out = DenseMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = dot(xt.row(i), xt.row(j));
            out.set(i, j, v);
            out.set(j, i, v);
        }
    }
    out
}

/// Sum of squared entries.
pub fn frobenius_norm_sq(x: &DenseMatrix) -> f64 {
    x.as_slice().iter().map(|v| v * v).sum()
}

/// `||A - B||_F^2` without allocating the difference.
pub fn frobenius_dist_sq(a: &DenseMatrix, b: &DenseMatrix) -> Result<f64> {
    if a.shape() != b.shape() {
        return Err(Error::dim(format!(
            "distance between {}x{} and {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    Ok(a.as_slice()
        .iter()
        .zip(b.as_slice())
        .map(|(x, y)| (x - y) * (x - y))
        .sum())
}

pub fn trace(x: &DenseMatrix) -> Result<f64> {
    if !x.is_square() {
        return Err(Error::dim(format!(
            "trace of a {}x{} matrix",
            x.rows(),
            x.cols()
        )));
    }
    Ok(x.diag().iter().sum())
}

/// `tr(A^T B)` = sum of elementwise products.
pub fn trace_of_product(a: &DenseMatrix, b: &DenseMatrix) -> Result<f64> {
    if a.shape() != b.shape() {
        return Err(Error::dim(format!(
            "tr(A^T B) of {}x{} and {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    Ok(dot(a.as_slice(), b.as_slice()))
}
