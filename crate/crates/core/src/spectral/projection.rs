//! Factor an orthogonal projection as `P = G Gᵀ` with orthonormal `G`.

use crate::error::{Error, Result};
use crate::linalg::{sym_eig, DenseMatrix};

/// Largest tolerated entry of `P P - P`, and of an eigenvalue's distance to
/// `{0, 1}`.
pub const IDEMPOTENCE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionFactor {
    /// m x k, orthonormal columns.
    pub g: DenseMatrix,
    /// All eigenvalues of `P`, descending.
    pub eigenvalues: Vec<f64>,
}

impl ProjectionFactor {
    pub fn rank(&self) -> usize {
        self.g.cols()
    }
}

/// The rank is the number of eigenvalues above one half; `G` holds the
/// matching eigenvectors.
pub fn projection_factor(p: &DenseMatrix) -> Result<ProjectionFactor> {
    let eig = sym_eig(p)?;
    let residual = p.matmul(p)?.sub(p)?.max_abs();
    if residual > IDEMPOTENCE_TOL {
        return Err(Error::Projection(residual));
    }
    if let Some(&bad) = eig
        .eigenvalues
        .iter()
        .find(|&&l| l.abs().min((l - 1.0).abs()) > IDEMPOTENCE_TOL)
    {
        return Err(Error::Projection(bad.abs().min((bad - 1.0).abs())));
    }
    let k = eig.eigenvalues.iter().filter(|&&l| l > 0.5).count();
    if k == 0 {
        return Err(Error::Projection(0.0));
    }
    let idx: Vec<usize> = (0..k).collect();
    Ok(ProjectionFactor {
        g: eig.eigenvectors.select_columns(&idx),
        eigenvalues: eig.eigenvalues,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_one_projection() {
        let p = DenseMatrix::from_rows(&[vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap();
        let f = projection_factor(&p).unwrap();
        assert_eq!(f.rank(), 1);
        let s = 1.0 / 2f64.sqrt();
        assert!((f.g[(0, 0)].abs() - s).abs() < 1e-12);
        assert!((f.g[(0, 0)] - f.g[(1, 0)]).abs() < 1e-12);
    }

    #[test]
    fn rejects_non_idempotent() {
        let p = DenseMatrix::from_rows(&[vec![2.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert!(matches!(projection_factor(&p), Err(Error::Projection(_))));
    }
}
