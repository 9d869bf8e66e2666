//! Iteration contract shared by every solver.

use std::time::Duration;

use rand::{Rng as _, SeedableRng};
use rand_xoshiro::SplitMix64;

use crate::cluster::normalized_indicator;
use crate::cluster::AssignmentMatrix;
use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;

/// Pseudo-random source used everywhere: SplitMix64 (64-bit state).
pub type Rng = SplitMix64;

pub fn rng(seed: u64) -> Rng {
    SplitMix64::seed_from_u64(seed)
}

/// Uniform sample on `(0, 1]`.
pub(crate) fn unit_open_closed(rng: &mut Rng) -> f64 {
    1.0 - rng.random::<f64>()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub seed: u64,
    pub max_iter: usize,
    /// Relative objective change below which iteration stops.
    pub tol: f64,
    /// Guard added to denominators of multiplicative updates.
    pub epsilon: f64,
    pub restarts: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            max_iter: 300,
            tol: 1e-6,
            epsilon: 1e-12,
            restarts: 10,
        }
    }
}

impl SolverConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_restarts(mut self, restarts: usize) -> Self {
        self.restarts = restarts;
        self
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_iter < 1 {
            return Err(Error::config("max_iter must be at least 1"));
        }
        if self.tol.is_nan() || self.tol < 0.0 {
            return Err(Error::config("tol must be nonnegative"));
        }
        if self.epsilon.is_nan() || self.epsilon <= 0.0 {
            return Err(Error::config("epsilon must be positive"));
        }
        if self.restarts < 1 {
            return Err(Error::config("restarts must be at least 1"));
        }
        Ok(())
    }

    pub(crate) fn converged(&self, previous: f64, current: f64) -> bool {
        let scale = previous.abs().max(current.abs()).max(f64::MIN_POSITIVE);
        (previous - current).abs() / scale < self.tol
    }
}

/// Outcome of a solver run (best restart).
///
/// `objective_trace[0]` is the objective at the initial iterate; solvers that
/// alternate two exact subproblem solves record one entry per half-step.
#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub labels: Vec<usize>,
    pub objective: f64,
    pub objective_trace: Vec<f64>,
    /// Accepted updates; a start that is already a fixed point reports 0.
    pub iterations: usize,
    pub wall_time: Duration,
    pub restarts_used: usize,
}

/// Starting point for the factorization solvers.
#[derive(Debug, Clone, PartialEq)]
pub enum FactorInit {
    /// Seeded uniform entries on `(0, 1]`, one draw per restart.
    Random,
    /// Start from this exact factor (a single run; restarts are ignored).
    Given(DenseMatrix),
    /// Warm start from hard labels: normalized indicator plus `0.2`.
    Labels(Vec<usize>),
}

impl FactorInit {
    /// The starting factor for a fixed (non-random) init, if any.
    pub(crate) fn fixed(&self, rows: usize, k: usize) -> Result<Option<DenseMatrix>> {
        match self {
            FactorInit::Random => Ok(None),
            FactorInit::Given(g) => {
                if g.shape() != (rows, k) {
                    return Err(Error::dim(format!(
                        "initial factor is {}x{}, expected {rows}x{k}",
                        g.rows(),
                        g.cols()
                    )));
                }
                if let Some((row, col, value)) = g.find_negative() {
                    return Err(Error::Nonnegativity { row, col, value });
                }
                Ok(Some(g.clone()))
            }
            FactorInit::Labels(labels) => {
                if labels.len() != rows {
                    return Err(Error::dim(format!(
                        "{} warm-start labels for {rows} rows",
                        labels.len()
                    )));
                }
                let b = AssignmentMatrix::new(labels.clone(), k)?;
                Ok(Some(normalized_indicator(&b).g.map(|v| v + 0.2)))
            }
        }
    }
}

pub(crate) fn random_factor(rng: &mut Rng, rows: usize, cols: usize, scale: f64) -> DenseMatrix {
    DenseMatrix::from_fn(rows, cols, |_, _| unit_open_closed(rng) * scale)
}

/// Largest number of step halvings tried before a step is rejected.
const MAX_HALVINGS: usize = 40;

/// Accepts a multiplicative-update proposal only if it does not worsen the
/// objective; otherwise backtracks along the segment toward `current`.
/// Returns `None` when no tried step improves on `current_obj`.
pub(crate) fn safeguarded_step(
    current: &DenseMatrix,
    current_obj: f64,
    proposal: DenseMatrix,
    objective: impl Fn(&DenseMatrix) -> f64,
    maximize: bool,
) -> Option<(DenseMatrix, f64)> {
    let better = |v: f64| {
        if maximize {
            v >= current_obj
        } else {
            v <= current_obj
        }
    };
    let obj = objective(&proposal);
    if obj.is_finite() && better(obj) {
        return Some((proposal, obj));
    }
    let delta = proposal.sub(current).expect("same shape");
    let mut t = 0.5;
    for _ in 0..MAX_HALVINGS {
        let cand = current
            .add(&delta.scale(t))
            .expect("same shape")
            .map(|v| v.max(0.0));
        let obj = objective(&cand);
        if obj.is_finite() && better(obj) {
            return Some((cand, obj));
        }
        t *= 0.5;
    }
    None
}

pub(crate) fn better_run(candidate: f64, best: Option<f64>, maximize: bool) -> bool {
    match best {
        None => true,
        Some(b) if maximize => candidate > b,
        Some(b) => candidate < b,
    }
}

pub(crate) fn check_k(k: usize, limit: usize, what: &str) -> Result<()> {
    if k < 1 || k > limit {
        return Err(Error::config(format!(
            "k = {k} must satisfy 1 <= k <= {limit} ({what})"
        )));
    }
    Ok(())
}
