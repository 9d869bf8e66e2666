//! Projective NMF `X ≈ G Gᵀ X` with `G ≥ 0` (m x k). Pass `Xᵀ` to cluster
//! observations: then `G` is n x k and `||Xᵀ - G Gᵀ Xᵀ|| = ||X - X G Gᵀ||`.

use super::{guarded_iterations, report, run_restarts, SymFactor};
use crate::error::Result;
use crate::linalg::{frobenius_dist_sq, DenseMatrix};
use crate::solver::{check_k, FactorInit, RunReport, SolverConfig};

/// `||X - G Gᵀ X||_F^2`.
pub fn pnmf_objective(x: &DenseMatrix, g: &DenseMatrix) -> Result<f64> {
    let proj = g.matmul(&g.t_matmul(x)?)?;
    frobenius_dist_sq(x, &proj)
}

pub fn pnmf(x: &DenseMatrix, k: usize, cfg: &SolverConfig) -> Result<(SymFactor, RunReport)> {
    pnmf_with_init(x, k, cfg, &FactorInit::Random)
}

/// `G ← G ⊙ 2(XXᵀG) ⊘ (GGᵀXXᵀG + XXᵀGGᵀG + ε)`, under the descent guard.
pub fn pnmf_with_init(
    x: &DenseMatrix,
    k: usize,
    cfg: &SolverConfig,
    init: &FactorInit,
) -> Result<(SymFactor, RunReport)> {
    cfg.validate()?;
    x.ensure_nonnegative()?;
    let m = x.rows();
    check_k(k, m, "number of rows of the factorized matrix")?;
    let eps = cfg.epsilon;
    let objective = |g: &DenseMatrix| pnmf_objective(x, g).expect("shapes match");
    // columns of G start near unit norm
    let scale = (3.0 / m as f64).sqrt();
    run_restarts(m, k, cfg, init, scale, false, |g0| {
        let (g, obj, trace, iters) = guarded_iterations(g0, cfg, false, objective, |g| {
            // S G with S = X Xᵀ, never formed
            let sg = x.matmul(&x.t_matmul(g)?)?;
            let gtg = g.t_matmul(g)?;
            let gtsg = g.t_matmul(&sg)?;
            let den = g.matmul(&gtsg)?.add(&sg.matmul(&gtg)?)?;
            let mut out = g.clone();
            for ((o, &num), &d) in out
                .data_mut()
                .iter_mut()
                .zip(sg.as_slice())
                .zip(den.as_slice())
            {
                *o *= 2.0 * num / (d + eps);
            }
            Ok(out)
        })?;
        let f = SymFactor { g };
        let labels = f.labels();
        Ok((f, report(labels, obj, trace, iters)))
    })
}
