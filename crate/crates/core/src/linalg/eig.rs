//! Symmetric eigendecomposition by cyclic Jacobi rotations.

use super::DenseMatrix;
use crate::error::Result;

/// Symmetry tolerance accepted by [`sym_eig`], per entry.
pub const SYMMETRY_TOL: f64 = 1e-9;

const MAX_SWEEPS: usize = 100;
const OFF_DIAGONAL_RATIO: f64 = 1e-12;

/// Eigenpairs of a real symmetric matrix, eigenvalues in descending order.
#[derive(Debug, Clone)]
pub struct SymEigResult {
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors as columns, aligned with `eigenvalues`.
    pub eigenvectors: DenseMatrix,
}

impl SymEigResult {
    /// Rebuilds `Q Λ Q^T`.
    pub fn reconstruct(&self) -> DenseMatrix {
        let q = &self.eigenvectors;
        q.scale_columns(&self.eigenvalues)
            .matmul_t(q)
            .expect("eigenvector matrix is square")
    }

    pub fn min_eigenvalue(&self) -> f64 {
        *self.eigenvalues.last().expect("nonempty spectrum")
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues[0]
    }
}

/// Full eigendecomposition of a symmetric matrix.
///
/// Sweeps until the off-diagonal Frobenius mass drops below `1e-12` times the
/// diagonal mass, or 100 sweeps have run.
pub fn sym_eig(a: &DenseMatrix) -> Result<SymEigResult> {
    a.ensure_symmetric(SYMMETRY_TOL)?;
    let n = a.rows();
    // work on an exactly symmetric copy
    let mut m = a.symmetrize();
    let mut v = DenseMatrix::identity(n);

    for _ in 0..MAX_SWEEPS {
        let (off, diag) = masses(&m);
        if off <= OFF_DIAGONAL_RATIO * diag || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[(p, q)];
                if apq.abs() < f64::MIN_POSITIVE {
                    continue;
                }
                let theta = (m[(q, q)] - m[(p, p)]) / (2.0 * apq);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                rotate(&mut m, &mut v, p, q, c, s);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(j, j)].total_cmp(&m[(i, i)]));
    let eigenvalues = order.iter().map(|&i| m[(i, i)]).collect();
    let eigenvectors = v.select_columns(&order);
    Ok(SymEigResult {
        eigenvalues,
        eigenvectors,
    })
}

fn masses(m: &DenseMatrix) -> (f64, f64) {
    let n = m.rows();
    let mut off = 0.0;
    let mut diag = 0.0;
    for i in 0..n {
        for j in 0..n {
            let x = m[(i, j)] * m[(i, j)];
            if i == j {
                diag += x;
            } else {
                off += x;
            }
        }
    }
    (off.sqrt(), diag.sqrt())
}

/// Applies `M <- J^T M J`, `V <- V J` for the rotation in the (p, q) plane.
fn rotate(m: &mut DenseMatrix, v: &mut DenseMatrix, p: usize, q: usize, c: f64, s: f64) {
    let n = m.rows();
    for k in 0..n {
        let mkp = m[(k, p)];
        let mkq = m[(k, q)];
        m.set(k, p, c * mkp - s * mkq);
        m.set(k, q, s * mkp + c * mkq);
    }
    for k in 0..n {
        let mpk = m[(p, k)];
        let mqk = m[(q, k)];
        m.set(p, k, c * mpk - s * mqk);
        m.set(q, k, s * mpk + c * mqk);
    }
    m.set(p, q, 0.0);
    m.set(q, p, 0.0);
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v.set(k, p, c * vkp - s * vkq);
        v.set(k, q, s * vkp + c * vkq);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    #[test]
    fn identity_spectrum() {
        let r = sym_eig(&DenseMatrix::identity(2)).unwrap();
        assert_eq!(r.eigenvalues, vec![1.0, 1.0]);
    }

    #[test]
    fn swap_matrix() {
        let a = DenseMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let r = sym_eig(&a).unwrap();
        assert!((r.eigenvalues[0] - 1.0).abs() < 1e-14);
        assert!((r.eigenvalues[1] + 1.0).abs() < 1e-14);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let v0 = r.eigenvectors.column(0);
        let v1 = r.eigenvectors.column(1);
        assert!((v0[0].abs() - h).abs() < 1e-14 && (v0[0] - v0[1]).abs() < 1e-14);
        assert!((v1[0].abs() - h).abs() < 1e-14 && (v1[0] + v1[1]).abs() < 1e-14);
    }

    #[test]
    fn rejects_asymmetric() {
        let a = DenseMatrix::from_rows(&[vec![0.0, 1.0], vec![0.5, 0.0]]).unwrap();
        assert!(matches!(sym_eig(&a), Err(Error::Asymmetric { .. })));
        let b = DenseMatrix::zeros(2, 3);
        assert!(matches!(sym_eig(&b), Err(Error::NotSquare { .. })));
    }

    #[test]
    fn zero_matrix() {
        let r = sym_eig(&DenseMatrix::zeros(3, 3)).unwrap();
        assert!(r.eigenvalues.iter().all(|&l| l == 0.0));
    }
}
