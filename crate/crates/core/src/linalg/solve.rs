//! Cholesky solves for small symmetric positive-definite systems.

use super::DenseMatrix;

/// Lower-triangular Cholesky factor of `a`, or `None` if a pivot is not
/// safely positive.
pub(crate) fn cholesky(a: &[f64], n: usize) -> Option<Vec<f64>> {
    let max_diag = (0..n).map(|i| a[i * n + i].abs()).fold(0.0, f64::max);
    let floor = max_diag * 1e-14;
    let mut l = vec![0.0; n * n];
    for j in 0..n {
        let mut d = a[j * n + j];
        for k in 0..j {
            d -= l[j * n + k] * l[j * n + k];
        }
        if d.is_nan() || d <= floor {
            return None;
        }
        let d = d.sqrt();
        l[j * n + j] = d;
        for i in j + 1..n {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            l[i * n + j] = s / d;
        }
    }
    Some(l)
}

/// Solves `L L^T x = b` in place.
pub(crate) fn cholesky_solve_in_place(l: &[f64], n: usize, b: &mut [f64]) {
    for i in 0..n {
        let mut s = b[i];
        for k in 0..i {
            s -= l[i * n + k] * b[k];
        }
        b[i] = s / l[i * n + i];
    }
    for i in (0..n).rev() {
        let mut s = b[i];
        for k in i + 1..n {
            s -= l[k * n + i] * b[k];
        }
        b[i] = s / l[i * n + i];
    }
}

/// Cholesky factor of `a + ridge I`, escalating the ridge by 10x from
/// `1e-10` whenever factorization fails.
pub(crate) fn cholesky_with_ridge(a: &[f64], n: usize) -> Vec<f64> {
    if let Some(l) = cholesky(a, n) {
        return l;
    }
    let mut ridge = 1e-10;
    let mut work = a.to_vec();
    loop {
        for i in 0..n {
            work[i * n + i] = a[i * n + i] + ridge;
        }
        if let Some(l) = cholesky(&work, n) {
            return l;
        }
        ridge *= 10.0;
    }
}

/// Solves `S X = R` for symmetric positive-(semi)definite `S`, regularizing a
/// singular `S` with a small ridge.
pub fn solve_spd(s: &DenseMatrix, r: &DenseMatrix) -> DenseMatrix {
    let n = s.rows();
    assert!(s.is_square() && r.rows() == n);
    let l = cholesky_with_ridge(s.as_slice(), n);
    let mut out = DenseMatrix::zeros(n, r.cols());
    let mut col = vec![0.0; n];
    for j in 0..r.cols() {
        for (i, v) in col.iter_mut().enumerate() {
            *v = r[(i, j)];
        }
        cholesky_solve_in_place(&l, n, &mut col);
        for (i, &v) in col.iter().enumerate() {
            out.set(i, j, v);
        }
    }
    out
}
