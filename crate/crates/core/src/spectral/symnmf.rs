//! Symmetric NMF `A ≈ G Gᵀ`: kernel k-means with the orthogonality of `G`
//! relaxed.

use super::{guarded_iterations, report, run_restarts, SymFactor};
use crate::cluster::check_affinity;
use crate::error::Result;
use crate::linalg::{frobenius_dist_sq, frobenius_norm_sq, trace_of_product, DenseMatrix};
use crate::solver::{check_k, FactorInit, RunReport, SolverConfig};

/// `||A - G Gᵀ||_F^2`, evaluated directly.
pub fn symnmf_objective(a: &DenseMatrix, g: &DenseMatrix) -> Result<f64> {
    frobenius_dist_sq(a, &g.matmul_t(g)?)
}

/// `||A||² - 2 tr(Gᵀ A G) + ||Gᵀ G||²`.
pub fn symnmf_objective_expanded(a: &DenseMatrix, g: &DenseMatrix) -> Result<f64> {
    let ag = a.matmul(g)?;
    let gtg = g.t_matmul(g)?;
    Ok(frobenius_norm_sq(a) - 2.0 * trace_of_product(g, &ag)? + frobenius_norm_sq(&gtg))
}

pub fn symnmf(a: &DenseMatrix, k: usize, cfg: &SolverConfig) -> Result<(SymFactor, RunReport)> {
    symnmf_with_init(a, k, cfg, &FactorInit::Random)
}

/// Damped multiplicative rule `G ← G ⊙ (½ + (A G) ⊘ (2 G Gᵀ G + ε))`.
pub fn symnmf_with_init(
    a: &DenseMatrix,
    k: usize,
    cfg: &SolverConfig,
    init: &FactorInit,
) -> Result<(SymFactor, RunReport)> {
    cfg.validate()?;
    check_affinity(a)?;
    let n = a.rows();
    check_k(k, n, "number of observations")?;
    let eps = cfg.epsilon;
    let objective = |g: &DenseMatrix| symnmf_objective(a, g).expect("shapes match");
    let scale = (a.mean().max(0.0) / k as f64).sqrt().max(f64::MIN_POSITIVE);
    run_restarts(n, k, cfg, init, scale, false, |g0| {
        let (g, obj, trace, iters) = guarded_iterations(g0, cfg, false, objective, |g| {
            let ag = a.matmul(g)?;
            let ggtg = g.matmul(&g.t_matmul(g)?)?;
            let mut out = g.clone();
            for ((o, &num), &den) in out
                .data_mut()
                .iter_mut()
                .zip(ag.as_slice())
                .zip(ggtg.as_slice())
            {
                *o *= 0.5 + num / (2.0 * den + eps);
            }
            Ok(out)
        })?;
        let f = SymFactor { g };
        let labels = f.labels();
        Ok((f, report(labels, obj, trace, iters)))
    })
}
