//! Nonnegative spectral clustering: maximize `tr(Γᵀ A Γ)` over `Γ ≥ 0`
//! with `Γᵀ Δ Γ = I` enforced through the multiplicative rule.

use super::{guarded_iterations, report, run_restarts};
use crate::cluster::{check_affinity, labels_from_factor, AssignmentMatrix, Orientation};
use crate::error::{Error, Result};
use crate::linalg::{trace_of_product, DenseMatrix};
use crate::solver::{check_k, FactorInit, RunReport, SolverConfig};

/// Vertex degrees `δ_i = Σ_j A_ij` of an affinity matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeMatrix {
    diag: Vec<f64>,
}

impl DegreeMatrix {
    /// Fails with [`Error::Degree`] on an isolated vertex.
    pub fn from_affinity(a: &DenseMatrix) -> Result<Self> {
        check_affinity(a)?;
        let diag = a.row_sums();
        if let Some(i) = diag.iter().position(|&d| d.is_nan() || d <= 0.0) {
            return Err(Error::Degree(i));
        }
        Ok(Self { diag })
    }

    /// All-ones degrees, which turns the problem into plain trace maximization.
    pub fn identity(n: usize) -> Self {
        Self { diag: vec![1.0; n] }
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn sqrt(&self) -> Vec<f64> {
        self.diag.iter().map(|d| d.sqrt()).collect()
    }

    pub fn to_dense(&self) -> DenseMatrix {
        DenseMatrix::from_diag(&self.diag)
    }

    /// `Γᵀ Δ Γ`.
    pub fn gram(&self, gamma: &DenseMatrix) -> Result<DenseMatrix> {
        gamma.t_matmul(&gamma.scale_rows(&self.diag))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NscFactor {
    pub gamma: DenseMatrix,
    pub degree: DegreeMatrix,
}

impl NscFactor {
    /// Row argmax of `Δ^{1/2} Γ`.
    pub fn labels(&self) -> Vec<usize> {
        let weighted = self.gamma.scale_rows(&self.degree.sqrt());
        labels_from_factor(&weighted, Orientation::Rows).labels
    }
}

/// `tr(Γᵀ A Γ)`.
pub fn nsc_objective(a: &DenseMatrix, gamma: &DenseMatrix) -> Result<f64> {
    trace_of_product(gamma, &a.matmul(gamma)?)
}

/// `Γ = (b_1/||Δ^{1/2} b_1||, ..., b_k/||Δ^{1/2} b_k||)` for a hard partition.
pub fn nsc_indicator(a: &DenseMatrix, b: &AssignmentMatrix) -> Result<NscFactor> {
    let degree = DegreeMatrix::from_affinity(a)?;
    if b.n() != a.rows() {
        return Err(Error::dim(format!(
            "{} labels for a {}x{} affinity",
            b.n(),
            a.rows(),
            a.cols()
        )));
    }
    let mut volume = vec![0.0; b.k()];
    for (&l, &d) in b.labels().iter().zip(degree.diag()) {
        volume[l] += d;
    }
    let gamma = DenseMatrix::from_fn(b.n(), b.k(), |i, j| {
        if b.labels()[i] == j {
            1.0 / volume[j].sqrt()
        } else {
            0.0
        }
    });
    Ok(NscFactor { gamma, degree })
}

pub fn nsc(a: &DenseMatrix, k: usize, cfg: &SolverConfig) -> Result<(NscFactor, RunReport)> {
    nsc_with_init(a, k, cfg, &FactorInit::Random)
}

/// `Γ ← Γ ⊙ sqrt((A Γ) ⊘ (Δ Γ α + ε))` with `α = Γᵀ A Γ`, under the ascent
/// guard. Random and label starts are rescaled column-wise to
/// `γᵀ Δ γ = 0.01` first: from below the constraint surface the rule climbs
/// monotonically. A [`FactorInit::Given`] start is used as is.
pub fn nsc_with_init(
    a: &DenseMatrix,
    k: usize,
    cfg: &SolverConfig,
    init: &FactorInit,
) -> Result<(NscFactor, RunReport)> {
    cfg.validate()?;
    let degree = DegreeMatrix::from_affinity(a)?;
    let n = a.rows();
    check_k(k, n, "number of vertices")?;
    let eps = cfg.epsilon;
    let rescale = !matches!(init, FactorInit::Given(_));
    let objective = |g: &DenseMatrix| nsc_objective(a, g).expect("shapes match");
    run_restarts(n, k, cfg, init, 1.0, true, |g0| {
        let g0 = if rescale {
            normalize_columns(&g0, &degree)
        } else {
            g0
        };
        let (gamma, obj, trace, iters) = guarded_iterations(g0, cfg, true, objective, |g| {
            let ag = a.matmul(g)?;
            let alpha = g.t_matmul(&ag)?;
            let den = g.matmul(&alpha)?.scale_rows(degree.diag());
            Ok(super::sqrt_ratio_update(g, &ag, &den, eps))
        })?;
        let f = NscFactor {
            gamma,
            degree: degree.clone(),
        };
        let labels = f.labels();
        Ok((f, report(labels, obj, trace, iters)))
    })
}

/// `sqrt(γᵀ Δ γ)` of each column of a random start.
const START_NORM: f64 = 0.1;

fn normalize_columns(g: &DenseMatrix, degree: &DegreeMatrix) -> DenseMatrix {
    let scales: Vec<f64> = (0..g.cols())
        .map(|j| {
            let v: f64 = (0..g.rows())
                .map(|i| degree.diag()[i] * g[(i, j)].powi(2))
                .sum();
            if v > 0.0 {
                START_NORM / v.sqrt()
            } else {
                1.0
            }
        })
        .collect();
    g.scale_columns(&scales)
}
