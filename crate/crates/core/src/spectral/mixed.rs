//! Factorizations of mixed-sign data `X ≈ X F Bᵀ` with `B ≥ 0`: Semi-NMF
//! (`F` free), Convex-NMF (`F ≥ 0`, columns summing to one) and Cluster-NMF
//! (`F = B = G`).

use super::{guarded_iterations, report, run_restarts, sqrt_ratio_update, SymFactor};
use crate::cluster::{labels_from_factor, Orientation};
use crate::error::Result;
use crate::linalg::{frobenius_dist_sq, gram, solve_spd, DenseMatrix};
use crate::solver::{check_k, FactorInit, RunReport, SolverConfig};

/// `F` (combination weights, n x k) and `B` (assignment weights, n x k).
/// The centroids are the columns of `X F`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexFactors {
    pub f: DenseMatrix,
    pub b: DenseMatrix,
}

impl ConvexFactors {
    pub fn centroids(&self, x: &DenseMatrix) -> Result<DenseMatrix> {
        x.matmul(&self.f)
    }

    pub fn labels(&self) -> Vec<usize> {
        labels_from_factor(&self.b, Orientation::Rows).labels
    }
}

/// `||X - X F Bᵀ||_F^2`.
pub fn mixed_objective(x: &DenseMatrix, factors: &ConvexFactors) -> Result<f64> {
    let c = factors.centroids(x)?;
    frobenius_dist_sq(x, &c.matmul_t(&factors.b)?)
}

/// `||X - X G Gᵀ||_F^2`.
pub fn cluster_nmf_objective(x: &DenseMatrix, g: &DenseMatrix) -> Result<f64> {
    let xg = x.matmul(g)?;
    frobenius_dist_sq(x, &xg.matmul_t(g)?)
}

/// Least-squares weights `F = B (Bᵀ B)^{-1}`, so that `X F` minimizes
/// `||X - C Bᵀ||` over all centroid matrices `C`.
pub fn semi_nmf_centroids(b: &DenseMatrix) -> DenseMatrix {
    solve_spd(&gram(b), &b.transpose()).transpose()
}

fn split_mixed(x: &DenseMatrix) -> (DenseMatrix, DenseMatrix) {
    let a = gram(x);
    (a.positive_part(), a.negative_part())
}

fn hcat(a: &DenseMatrix, b: &DenseMatrix) -> DenseMatrix {
    let k = a.cols();
    DenseMatrix::from_fn(a.rows(), k + b.cols(), |i, j| {
        if j < k {
            a[(i, j)]
        } else {
            b[(i, j - k)]
        }
    })
}

fn split_at(s: &DenseMatrix, k: usize) -> (DenseMatrix, DenseMatrix) {
    let left: Vec<usize> = (0..k).collect();
    let right: Vec<usize> = (k..s.cols()).collect();
    (s.select_columns(&left), s.select_columns(&right))
}

/// Rescales `F` columns to sum to one and compensates in `B`.
fn normalize_convex(f: &DenseMatrix, b: &DenseMatrix) -> (DenseMatrix, DenseMatrix) {
    let sums: Vec<f64> = (0..f.cols()).map(|j| f.column(j).iter().sum()).collect();
    let inv: Vec<f64> = sums
        .iter()
        .map(|&s| if s > 0.0 { 1.0 / s } else { 1.0 })
        .collect();
    let keep: Vec<f64> = sums
        .iter()
        .map(|&s| if s > 0.0 { s } else { 1.0 })
        .collect();
    (f.scale_columns(&inv), b.scale_columns(&keep))
}

fn check_mixed(x: &DenseMatrix, k: usize, cfg: &SolverConfig) -> Result<()> {
    cfg.validate()?;
    check_k(k, x.cols(), "number of observations")
}

pub fn semi_nmf(
    x: &DenseMatrix,
    k: usize,
    cfg: &SolverConfig,
) -> Result<(ConvexFactors, RunReport)> {
    semi_nmf_with_init(x, k, cfg, &FactorInit::Random)
}

/// Alternates the closed-form `F` step with
/// `B ← B ⊙ sqrt(((XᵀC)⁺ + B(CᵀC)⁻) ⊘ ((XᵀC)⁻ + B(CᵀC)⁺ + ε))`, `C = X F`.
/// `init` seeds `B`.
pub fn semi_nmf_with_init(
    x: &DenseMatrix,
    k: usize,
    cfg: &SolverConfig,
    init: &FactorInit,
) -> Result<(ConvexFactors, RunReport)> {
    check_mixed(x, k, cfg)?;
    let eps = cfg.epsilon;
    let n = x.cols();
    let objective = |b: &DenseMatrix| {
        let f = semi_nmf_centroids(b);
        mixed_objective(x, &ConvexFactors { f, b: b.clone() }).expect("shapes match")
    };
    run_restarts(n, k, cfg, init, 1.0, false, |b0| {
        let (b, obj, trace, iters) = guarded_iterations(b0, cfg, false, objective, |b| {
            let c = x.matmul(&semi_nmf_centroids(b))?;
            let xtc = x.t_matmul(&c)?;
            let ctc = gram(&c);
            let num = xtc.positive_part().add(&b.matmul(&ctc.negative_part())?)?;
            let den = xtc.negative_part().add(&b.matmul(&ctc.positive_part())?)?;
            Ok(sqrt_ratio_update(b, &num, &den, eps))
        })?;
        let f = ConvexFactors {
            f: semi_nmf_centroids(&b),
            b,
        };
        let labels = f.labels();
        Ok((f, report(labels, obj, trace, iters)))
    })
}

pub fn convex_nmf(
    x: &DenseMatrix,
    k: usize,
    cfg: &SolverConfig,
) -> Result<(ConvexFactors, RunReport)> {
    convex_nmf_with_init(x, k, cfg, &FactorInit::Random)
}

/// Multiplicative updates on the split Gram matrix `XᵀX = A⁺ - A⁻`.
/// `init` seeds `B`; `F` starts as `B` with unit column sums.
pub fn convex_nmf_with_init(
    x: &DenseMatrix,
    k: usize,
    cfg: &SolverConfig,
    init: &FactorInit,
) -> Result<(ConvexFactors, RunReport)> {
    check_mixed(x, k, cfg)?;
    let eps = cfg.epsilon;
    let n = x.cols();
    let (ap, an) = split_mixed(x);
    let objective = |s: &DenseMatrix| {
        let (f, b) = split_at(s, k);
        mixed_objective(x, &ConvexFactors { f, b }).expect("shapes match")
    };
    run_restarts(n, k, cfg, init, 1.0, false, |b0| {
        let (f0, b0) = normalize_convex(&b0, &b0);
        let (s, obj, trace, iters) =
            guarded_iterations(hcat(&f0, &b0), cfg, false, objective, |s| {
                let (f, b) = split_at(s, k);
                let apf = ap.matmul(&f)?;
                let anf = an.matmul(&f)?;
                let ftapf = f.t_matmul(&apf)?;
                let ftanf = f.t_matmul(&anf)?;
                let num = apf.add(&b.matmul(&ftanf)?)?;
                let den = anf.add(&b.matmul(&ftapf)?)?;
                let b = sqrt_ratio_update(&b, &num, &den, eps);

                let btb = gram(&b);
                let num = ap.matmul(&b)?.add(&anf.matmul(&btb)?)?;
                let den = an.matmul(&b)?.add(&apf.matmul(&btb)?)?;
                let f = sqrt_ratio_update(&f, &num, &den, eps);
                let (f, b) = normalize_convex(&f, &b);
                Ok(hcat(&f, &b))
            })?;
        let (f, b) = split_at(&s, k);
        let f = ConvexFactors { f, b };
        let labels = f.labels();
        Ok((f, report(labels, obj, trace, iters)))
    })
}

pub fn cluster_nmf(
    x: &DenseMatrix,
    k: usize,
    cfg: &SolverConfig,
) -> Result<(SymFactor, RunReport)> {
    cluster_nmf_with_init(x, k, cfg, &FactorInit::Random)
}

/// `G ← G ⊙ sqrt((2A⁺G + GGᵀA⁻G + A⁻GGᵀG) ⊘ (2A⁻G + GGᵀA⁺G + A⁺GGᵀG + ε))`
/// with `A = XᵀX`, under the descent guard.
pub fn cluster_nmf_with_init(
    x: &DenseMatrix,
    k: usize,
    cfg: &SolverConfig,
    init: &FactorInit,
) -> Result<(SymFactor, RunReport)> {
    check_mixed(x, k, cfg)?;
    let eps = cfg.epsilon;
    let n = x.cols();
    let (ap, an) = split_mixed(x);
    let objective = |g: &DenseMatrix| cluster_nmf_objective(x, g).expect("shapes match");
    let scale = (3.0 / n as f64).sqrt();
    run_restarts(n, k, cfg, init, scale, false, |g0| {
        let (g, obj, trace, iters) = guarded_iterations(g0, cfg, false, objective, |g| {
            let apg = ap.matmul(g)?;
            let ang = an.matmul(g)?;
            let gtg = gram(g);
            let num = apg
                .scale(2.0)
                .add(&g.matmul(&g.t_matmul(&ang)?)?)?
                .add(&ang.matmul(&gtg)?)?;
            let den = ang
                .scale(2.0)
                .add(&g.matmul(&g.t_matmul(&apg)?)?)?
                .add(&apg.matmul(&gtg)?)?;
            Ok(sqrt_ratio_update(g, &num, &den, eps))
        })?;
        let f = SymFactor { g };
        let labels = f.labels();
        Ok((f, report(labels, obj, trace, iters)))
    })
}
