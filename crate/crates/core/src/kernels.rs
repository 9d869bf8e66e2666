//! Kernel and affinity matrices.
//!
//! The feature map is never materialized: every solver that needs inner
//! products in feature space consumes the n x n kernel matrix instead of
//! `X^T X`.

use crate::error::{Error, Result};
use crate::linalg::{gram, sym_eig, DenseMatrix};

/// Kernel matrices above this many observations are refused by default.
pub const DEFAULT_MAX_OBSERVATIONS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelSpec {
    /// `x^T y`.
    Linear,
    /// `exp(-gamma ||x - y||^2)`. When `gamma` is `None` it defaults to
    /// `1 / (m * median pairwise squared distance)`.
    Rbf { gamma: Option<f64> },
    /// `(x^T y + coef)^degree`.
    Polynomial { degree: u32, coef: f64 },
}

impl KernelSpec {
    pub fn rbf(gamma: f64) -> Self {
        KernelSpec::Rbf { gamma: Some(gamma) }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            KernelSpec::Linear => Ok(()),
            KernelSpec::Rbf { gamma: Some(g) } if !(g > 0.0 && g.is_finite()) => Err(
                Error::config(format!("rbf gamma must be positive, got {g}")),
            ),
            KernelSpec::Rbf { .. } => Ok(()),
            KernelSpec::Polynomial { degree: 0, .. } => {
                Err(Error::config("polynomial degree must be at least 1"))
            }
            KernelSpec::Polynomial { coef, .. } if !coef.is_finite() => {
                Err(Error::config("polynomial coef must be finite"))
            }
            KernelSpec::Polynomial { .. } => Ok(()),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            KernelSpec::Linear => "linear",
            KernelSpec::Rbf { .. } => "rbf",
            KernelSpec::Polynomial { .. } => "polynomial",
        }
    }
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// `1 / (m * median pairwise squared distance)` over distinct pairs.
pub fn default_gamma(x: &DenseMatrix) -> f64 {
    let xt = x.transpose();
    let n = x.cols();
    let mut d: Vec<f64> = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            d.push(sq_dist(xt.row(i), xt.row(j)));
        }
    }
    if d.is_empty() {
        return 1.0;
    }
    let mid = d.len() / 2;
    let (_, median, _) = d.select_nth_unstable_by(mid, f64::total_cmp);
    let median = *median;
    if median > 0.0 {
        1.0 / (x.rows() as f64 * median)
    } else {
        1.0
    }
}

pub fn kernel_matrix(x: &DenseMatrix, spec: &KernelSpec) -> Result<DenseMatrix> {
    kernel_matrix_with_limit(x, spec, DEFAULT_MAX_OBSERVATIONS)
}

pub fn kernel_matrix_with_limit(
    x: &DenseMatrix,
    spec: &KernelSpec,
    max_observations: usize,
) -> Result<DenseMatrix> {
    spec.validate()?;
    let n = x.cols();
    if n > max_observations {
        return Err(Error::config(format!(
            "kernel matrix for {n} observations exceeds the limit of {max_observations}"
        )));
    }
    let k = match *spec {
        KernelSpec::Linear => gram(x),
        KernelSpec::Rbf { gamma } => {
            let gamma = gamma.unwrap_or_else(|| default_gamma(x));
            let xt = x.transpose();
            DenseMatrix::from_fn(n, n, |i, j| {
                if i == j {
                    1.0
                } else {
                    (-gamma * sq_dist(xt.row(i), xt.row(j))).exp()
                }
            })
        }
        KernelSpec::Polynomial { degree, coef } => gram(x).map(|v| (v + coef).powi(degree as i32)),
    };
    if !k.is_finite() {
        return Err(Error::config(format!(
            "{} kernel produced non-finite entries",
            spec.name()
        )));
    }
    Ok(k.symmetrize())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffinityReport {
    pub symmetric: bool,
    pub nonnegative: bool,
    pub psd: bool,
    pub min_eigenvalue: f64,
    pub max_eigenvalue: f64,
}

/// Symmetry (1e-9), sign and positive-semidefiniteness checks. PSD means the
/// smallest eigenvalue is at least `-1e-8` times the largest.
pub fn validate_affinity(a: &DenseMatrix) -> Result<AffinityReport> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let symmetric = a.asymmetry().0 <= 1e-9;
    let nonnegative = a.find_negative().is_none();
    let eig = sym_eig(&a.symmetrize())?;
    let (min_eigenvalue, max_eigenvalue) = (eig.min_eigenvalue(), eig.max_eigenvalue());
    let psd = min_eigenvalue >= -1e-8 * max_eigenvalue.abs().max(f64::MIN_POSITIVE);
    Ok(AffinityReport {
        symmetric,
        nonnegative,
        psd: symmetric && psd,
        min_eigenvalue,
        max_eigenvalue,
    })
}
