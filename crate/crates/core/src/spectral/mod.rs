//! Affinity- and projection-based factorizations.
//!
//! All of these relax the normalized indicator `G = B D^{1/2}` of a hard
//! clustering to a nonnegative matrix and read labels back by row argmax.
//! Multiplicative updates here are wrapped in a backtracking guard: a
//! proposal that worsens the objective is pulled back toward the current
//! iterate, so every reported trace is monotone.

mod mixed;
mod nsc;
mod pnmf;
mod projection;
mod symnmf;

pub use mixed::{
    cluster_nmf, cluster_nmf_objective, cluster_nmf_with_init, convex_nmf, convex_nmf_with_init,
    mixed_objective, semi_nmf, semi_nmf_centroids, semi_nmf_with_init, ConvexFactors,
};
pub use nsc::{nsc, nsc_indicator, nsc_objective, nsc_with_init, DegreeMatrix, NscFactor};
pub use pnmf::{pnmf, pnmf_objective, pnmf_with_init};
pub use projection::{projection_factor, ProjectionFactor};
pub use symnmf::{symnmf, symnmf_objective, symnmf_objective_expanded, symnmf_with_init};

use std::time::Instant;

use crate::cluster::{labels_from_factor, Orientation};
use crate::error::Result;
use crate::linalg::DenseMatrix;
use crate::solver::{
    better_run, random_factor, rng, safeguarded_step, FactorInit, RunReport, SolverConfig,
};

/// Nonnegative n x k factor (`G` of symmetric NMF, PNMF and Cluster-NMF).
#[derive(Debug, Clone, PartialEq)]
pub struct SymFactor {
    pub g: DenseMatrix,
}

impl SymFactor {
    pub fn labels(&self) -> Vec<usize> {
        labels_from_factor(&self.g, Orientation::Rows).labels
    }
}

/// Runs `solve_once` per starting factor and keeps the best objective.
/// Random starts are uniform on `(0, scale]`.
pub(crate) fn run_restarts<T>(
    rows: usize,
    k: usize,
    cfg: &SolverConfig,
    init: &FactorInit,
    scale: f64,
    maximize: bool,
    mut solve_once: impl FnMut(DenseMatrix) -> Result<(T, RunReport)>,
) -> Result<(T, RunReport)> {
    let start = Instant::now();
    let (mut best, restarts) = match init.fixed(rows, k)? {
        Some(g0) => (solve_once(g0)?, 1),
        None => {
            let mut rng = rng(cfg.seed);
            let mut best: Option<(T, RunReport)> = None;
            for _ in 0..cfg.restarts {
                let g0 = random_factor(&mut rng, rows, k, scale);
                let run = solve_once(g0)?;
                if better_run(
                    run.1.objective,
                    best.as_ref().map(|b| b.1.objective),
                    maximize,
                ) {
                    best = Some(run);
                }
            }
            (best.expect("at least one restart"), cfg.restarts)
        }
    };
    best.1.restarts_used = restarts;
    best.1.wall_time = start.elapsed();
    Ok(best)
}

/// Iterates `propose` under the backtracking guard until the relative
/// objective change drops below `cfg.tol`, no step improves, or
/// `cfg.max_iter` is reached. Returns the final factor, objective, trace and
/// iteration count.
pub(crate) fn guarded_iterations(
    g0: DenseMatrix,
    cfg: &SolverConfig,
    maximize: bool,
    objective: impl Fn(&DenseMatrix) -> f64,
    mut propose: impl FnMut(&DenseMatrix) -> Result<DenseMatrix>,
) -> Result<(DenseMatrix, f64, Vec<f64>, usize)> {
    let mut g = g0;
    let mut obj = objective(&g);
    let mut trace = vec![obj];
    let mut iterations = 0;
    while iterations < cfg.max_iter {
        let proposal = propose(&g)?;
        let Some((next, next_obj)) = safeguarded_step(&g, obj, proposal, &objective, maximize)
        else {
            break;
        };
        iterations += 1;
        let done = cfg.converged(obj, next_obj);
        g = next;
        obj = next_obj;
        trace.push(obj);
        if done {
            break;
        }
    }
    Ok((g, obj, trace, iterations))
}

/// `G ⊙ sqrt(num ⊘ (den + ε))`.
pub(crate) fn sqrt_ratio_update(
    g: &DenseMatrix,
    num: &DenseMatrix,
    den: &DenseMatrix,
    eps: f64,
) -> DenseMatrix {
    let mut out = g.clone();
    for ((o, &n), &d) in out
        .data_mut()
        .iter_mut()
        .zip(num.as_slice())
        .zip(den.as_slice())
    {
        *o *= (n / (d + eps)).sqrt();
    }
    out
}

pub(crate) fn report(
    labels: Vec<usize>,
    objective: f64,
    trace: Vec<f64>,
    iterations: usize,
) -> RunReport {
    RunReport {
        labels,
        objective,
        objective_trace: trace,
        iterations,
        wall_time: Default::default(),
        restarts_used: 1,
    }
}
