//! Euclidean NMF `X ≈ W H` (multiplicative updates and alternating NNLS)
//! and sparse NMF with stacked regularizers.
//!
//! `W` is m x k (basis), `H` is k x n (one encoding column per observation).
//! Cluster labels are read off the columns of `H` by argmax.

use std::time::Instant;

use crate::cluster::{labels_from_factor, Orientation};
use crate::error::{Error, Result};
use crate::linalg::{frobenius_dist_sq, frobenius_norm_sq, nnls, DenseMatrix};
use crate::solver::{better_run, random_factor, rng, RunReport, SolverConfig};

#[derive(Debug, Clone, PartialEq)]
pub struct FactorPair {
    pub w: DenseMatrix,
    pub h: DenseMatrix,
}

impl FactorPair {
    pub fn k(&self) -> usize {
        self.w.cols()
    }

    pub fn product(&self) -> DenseMatrix {
        self.w.matmul(&self.h).expect("conformable factors")
    }

    /// Rescales so every basis column has unit Euclidean norm, moving the
    /// scale into the matching row of `H`. `W H` is unchanged.
    pub fn normalized(&self) -> FactorPair {
        let k = self.k();
        let norms: Vec<f64> = (0..k)
            .map(|j| self.w.column(j).iter().map(|v| v * v).sum::<f64>().sqrt())
            .collect();
        let inv: Vec<f64> = norms
            .iter()
            .map(|&s| if s > 0.0 { 1.0 / s } else { 1.0 })
            .collect();
        let fwd: Vec<f64> = norms
            .iter()
            .map(|&s| if s > 0.0 { s } else { 1.0 })
            .collect();
        FactorPair {
            w: self.w.scale_columns(&inv),
            h: self.h.scale_rows(&fwd),
        }
    }
}

/// Sparse-NMF regularization weights.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnmfParams {
    /// Frobenius shrinkage on `W`.
    pub eta: f64,
    /// Squared-L1 sparsity on each column of `H`.
    pub beta: f64,
}

impl SnmfParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.eta >= 0.0 && self.eta.is_finite()) {
            return Err(Error::config(format!(
                "eta must be nonnegative, got {}",
                self.eta
            )));
        }
        if !(self.beta >= 0.0 && self.beta.is_finite()) {
            return Err(Error::config(format!(
                "beta must be nonnegative, got {}",
                self.beta
            )));
        }
        Ok(())
    }
}

/// Starting factors for the NMF solvers.
#[derive(Debug, Clone, PartialEq)]
pub enum NmfInit {
    Random,
    Given(FactorPair),
}

/// `||X - W H||_F^2`.
pub fn nmf_objective(x: &DenseMatrix, f: &FactorPair) -> f64 {
    frobenius_dist_sq(x, &f.product()).expect("factor shapes match data")
}

fn column_l1_sq_sum(h: &DenseMatrix) -> f64 {
    (0..h.cols())
        .map(|j| {
            let l1: f64 = (0..h.rows()).map(|i| h[(i, j)].abs()).sum();
            l1 * l1
        })
        .sum()
}

/// `½ (||X - WH||² + η ||W||² + β Σ_j |h_j|₁²)`.
pub fn snmf_objective(x: &DenseMatrix, f: &FactorPair, params: &SnmfParams) -> f64 {
    0.5 * (nmf_objective(x, f)
        + params.eta * frobenius_norm_sq(&f.w)
        + params.beta * column_l1_sq_sum(&f.h))
}

/// `||[W; √β 1ᵀ] H - [X; 0]||_F^2`, built from the stacked matrices.
pub fn stacked_h_residual(x: &DenseMatrix, f: &FactorPair, beta: f64) -> Result<f64> {
    let (lhs, rhs) = stack_for_h(x, &f.w, beta)?;
    frobenius_dist_sq(&lhs.matmul(&f.h)?, &rhs)
}

/// `||[Hᵀ; √η I_k] Wᵀ - [Xᵀ; 0]||_F^2`, built from the stacked matrices.
pub fn stacked_w_residual(x: &DenseMatrix, f: &FactorPair, eta: f64) -> Result<f64> {
    let (lhs, rhs) = stack_for_w(x, &f.h, eta)?;
    frobenius_dist_sq(&lhs.matmul(&f.w.transpose())?, &rhs)
}

fn stack_for_h(x: &DenseMatrix, w: &DenseMatrix, beta: f64) -> Result<(DenseMatrix, DenseMatrix)> {
    let k = w.cols();
    let ones = DenseMatrix::from_fn(1, k, |_, _| beta.sqrt());
    Ok((
        w.vstack(&ones)?,
        x.vstack(&DenseMatrix::zeros(1, x.cols()))?,
    ))
}

fn stack_for_w(x: &DenseMatrix, h: &DenseMatrix, eta: f64) -> Result<(DenseMatrix, DenseMatrix)> {
    let k = h.rows();
    let ridge = DenseMatrix::identity(k).scale(eta.sqrt());
    Ok((
        h.transpose().vstack(&ridge)?,
        x.transpose().vstack(&DenseMatrix::zeros(k, x.rows()))?,
    ))
}

/// Mean over nonzero columns of `1 - |h|₁ / (√k ||h||₂)`.
pub fn mean_column_sparsity(h: &DenseMatrix) -> f64 {
    let k = h.rows() as f64;
    let mut total = 0.0;
    let mut counted = 0usize;
    for j in 0..h.cols() {
        let col = h.column(j);
        let l2 = col.iter().map(|v| v * v).sum::<f64>().sqrt();
        if l2 == 0.0 {
            continue;
        }
        let l1: f64 = col.iter().map(|v| v.abs()).sum();
        total += 1.0 - l1 / (k.sqrt() * l2);
        counted += 1;
    }
    if counted == 0 {
        0.0
    } else {
        total / counted as f64
    }
}

fn check_problem(x: &DenseMatrix, k: usize, cfg: &SolverConfig) -> Result<()> {
    cfg.validate()?;
    x.ensure_nonnegative()?;
    let limit = x.rows().min(x.cols());
    if k == 0 || (k >= limit && k != 1) {
        return Err(Error::config(format!(
            "rank k = {k} must satisfy 1 <= k < min(m, n) = {limit}"
        )));
    }
    Ok(())
}

fn check_init(init: &NmfInit, x: &DenseMatrix, k: usize) -> Result<()> {
    if let NmfInit::Given(f) = init {
        if f.w.shape() != (x.rows(), k) || f.h.shape() != (k, x.cols()) {
            return Err(Error::dim(format!(
                "initial factors are {:?} and {:?}, expected ({}, {k}) and ({k}, {})",
                f.w.shape(),
                f.h.shape(),
                x.rows(),
                x.cols()
            )));
        }
        f.w.ensure_nonnegative()?;
        f.h.ensure_nonnegative()?;
    }
    Ok(())
}

/// Runs `solve_once` from each starting point and keeps the lowest objective.
fn run_restarts(
    x: &DenseMatrix,
    k: usize,
    cfg: &SolverConfig,
    init: &NmfInit,
    mut solve_once: impl FnMut(FactorPair) -> Result<(FactorPair, RunReport)>,
) -> Result<(FactorPair, RunReport)> {
    let start = Instant::now();
    let (mut best, restarts) = match init {
        NmfInit::Given(f) => (solve_once(f.clone())?, 1),
        NmfInit::Random => {
            let scale = (x.mean().max(0.0) / k as f64).sqrt().max(f64::EPSILON);
            let mut rng = rng(cfg.seed);
            let mut best: Option<(FactorPair, RunReport)> = None;
            for _ in 0..cfg.restarts {
                let w = random_factor(&mut rng, x.rows(), k, scale);
                let h = random_factor(&mut rng, k, x.cols(), scale);
                let run = solve_once(FactorPair { w, h })?;
                if better_run(run.1.objective, best.as_ref().map(|b| b.1.objective), false) {
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

fn report(f: &FactorPair, objective: f64, trace: Vec<f64>, iterations: usize) -> RunReport {
    RunReport {
        labels: labels_from_factor(&f.h, Orientation::Cols).labels,
        objective,
        objective_trace: trace,
        iterations,
        wall_time: Default::default(),
        restarts_used: 1,
    }
}

/// Lee–Seung multiplicative updates.
pub fn nmf_mu(x: &DenseMatrix, k: usize, cfg: &SolverConfig) -> Result<(FactorPair, RunReport)> {
    nmf_mu_with_init(x, k, cfg, &NmfInit::Random)
}

pub fn nmf_mu_with_init(
    x: &DenseMatrix,
    k: usize,
    cfg: &SolverConfig,
    init: &NmfInit,
) -> Result<(FactorPair, RunReport)> {
    check_problem(x, k, cfg)?;
    check_init(init, x, k)?;
    run_restarts(x, k, cfg, init, |f| mu_run(x, f, cfg))
}

fn mu_run(
    x: &DenseMatrix,
    mut f: FactorPair,
    cfg: &SolverConfig,
) -> Result<(FactorPair, RunReport)> {
    let eps = cfg.epsilon;
    let mut objective = nmf_objective(x, &f);
    let mut trace = vec![objective];
    let mut iterations = 0;
    while iterations < cfg.max_iter {
        // H <- H ⊙ (WᵀX) ⊘ (WᵀWH + ε)
        let num = f.w.t_matmul(x)?;
        let den = f.w.t_matmul(&f.w)?.matmul(&f.h)?;
        f.h = multiplicative(&f.h, &num, &den, eps);
        // W <- W ⊙ (XHᵀ) ⊘ (WHHᵀ + ε)
        let num = x.matmul_t(&f.h)?;
        let den = f.w.matmul(&f.h.matmul_t(&f.h)?)?;
        f.w = multiplicative(&f.w, &num, &den, eps);

        iterations += 1;
        let obj = nmf_objective(x, &f);
        trace.push(obj);
        let done = cfg.converged(objective, obj);
        objective = obj;
        if done {
            break;
        }
    }
    let r = report(&f, objective, trace, iterations);
    Ok((f, r))
}

/// `base ⊙ num ⊘ (den + ε)`.
pub(crate) fn multiplicative(
    base: &DenseMatrix,
    num: &DenseMatrix,
    den: &DenseMatrix,
    eps: f64,
) -> DenseMatrix {
    let mut out = base.clone();
    for ((o, &n), &d) in out
        .data_mut()
        .iter_mut()
        .zip(num.as_slice())
        .zip(den.as_slice())
    {
        *o *= n / (d + eps);
    }
    out
}

/// Alternating nonnegative least squares: exact NNLS solves for `H` then
/// `W`. The trace holds one entry per half-step.
pub fn nmf_anls(x: &DenseMatrix, k: usize, cfg: &SolverConfig) -> Result<(FactorPair, RunReport)> {
    nmf_anls_with_init(x, k, cfg, &NmfInit::Random)
}

pub fn nmf_anls_with_init(
    x: &DenseMatrix,
    k: usize,
    cfg: &SolverConfig,
    init: &NmfInit,
) -> Result<(FactorPair, RunReport)> {
    check_problem(x, k, cfg)?;
    check_init(init, x, k)?;
    run_restarts(x, k, cfg, init, |f| {
        alternating_run(
            f,
            cfg,
            |f| nmf_objective(x, f),
            |w| nnls(w, x),
            |h| nnls(&h.transpose(), &x.transpose()),
        )
    })
}

/// Sparse NMF: alternating NNLS on the stacked systems
/// `[W; √β 1ᵀ] H ≈ [X; 0]` and `[Hᵀ; √η I] Wᵀ ≈ [Xᵀ; 0]`. The reported
/// objective is the regularized cost with the leading ½.
pub fn snmf(
    x: &DenseMatrix,
    k: usize,
    params: &SnmfParams,
    cfg: &SolverConfig,
) -> Result<(FactorPair, RunReport)> {
    snmf_with_init(x, k, params, cfg, &NmfInit::Random)
}

pub fn snmf_with_init(
    x: &DenseMatrix,
    k: usize,
    params: &SnmfParams,
    cfg: &SolverConfig,
    init: &NmfInit,
) -> Result<(FactorPair, RunReport)> {
    check_problem(x, k, cfg)?;
    params.validate()?;
    check_init(init, x, k)?;
    let SnmfParams { eta, beta } = *params;
    run_restarts(x, k, cfg, init, |f| {
        alternating_run(
            f,
            cfg,
            |f| snmf_objective(x, f, params),
            |w| {
                let (lhs, rhs) = stack_for_h(x, w, beta)?;
                nnls(&lhs, &rhs)
            },
            |h| {
                let (lhs, rhs) = stack_for_w(x, h, eta)?;
                nnls(&lhs, &rhs)
            },
        )
    })
}

/// Shared ANLS loop. A half-step that would raise the objective (possible
/// only through rounding) is discarded, so the trace never increases.
fn alternating_run(
    mut f: FactorPair,
    cfg: &SolverConfig,
    objective: impl Fn(&FactorPair) -> f64,
    solve_h: impl Fn(&DenseMatrix) -> Result<DenseMatrix>,
    solve_wt: impl Fn(&DenseMatrix) -> Result<DenseMatrix>,
) -> Result<(FactorPair, RunReport)> {
    let mut current = objective(&f);
    let mut trace = vec![current];
    let mut iterations = 0;
    while iterations < cfg.max_iter {
        let before = current;

        let h = solve_h(&f.w)?;
        let cand = FactorPair { w: f.w.clone(), h };
        let obj = objective(&cand);
        if obj <= current {
            f = cand;
            current = obj;
        }
        trace.push(current);

        let w = solve_wt(&f.h)?.transpose();
        let cand = FactorPair { w, h: f.h.clone() };
        let obj = objective(&cand);
        if obj <= current {
            f = cand;
            current = obj;
        }
        trace.push(current);

        iterations += 1;
        if cfg.converged(before, current) {
            break;
        }
    }
    let r = report(&f, current, trace, iterations);
    Ok((f, r))
}
