//! Lloyd's algorithm and its kernelized form.

use std::time::Instant;

use rand::Rng as _;

use crate::cluster::{kmeans_objective, AssignmentMatrix};
use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;
use crate::solver::{better_run, check_k, rng, Rng, RunReport, SolverConfig};

/// Best of `cfg.restarts` Lloyd runs, each seeded by k-means++.
pub fn lloyd(x: &DenseMatrix, k: usize, cfg: &SolverConfig) -> Result<RunReport> {
    cfg.validate()?;
    let n = x.cols();
    check_k(k, n, "number of observations")?;
    let start = Instant::now();
    let xt = x.transpose();
    let mut rng = rng(cfg.seed);
    let mut best: Option<RunReport> = None;
    for _ in 0..cfg.restarts {
        let seeds = plus_plus_seeds(&mut rng, n, k, |i, j| sq_dist(xt.row(i), xt.row(j)));
        let init = nearest_seed(n, &seeds, |i, j| sq_dist(xt.row(i), xt.row(j)));
        let run = lloyd_run(x, &xt, init, k, cfg)?;
        if better_run(run.objective, best.as_ref().map(|b| b.objective), false) {
            best = Some(run);
        }
    }
    let mut best = best.expect("at least one restart");
    best.restarts_used = cfg.restarts;
    best.wall_time = start.elapsed();
    Ok(best)
}

/// A single Lloyd run from the given initial assignment.
pub fn lloyd_from_labels(
    x: &DenseMatrix,
    labels: &[usize],
    k: usize,
    cfg: &SolverConfig,
) -> Result<RunReport> {
    cfg.validate()?;
    check_k(k, x.cols(), "number of observations")?;
    check_labels(labels, x.cols(), k)?;
    let start = Instant::now();
    let mut run = lloyd_run(x, &x.transpose(), labels.to_vec(), k, cfg)?;
    run.wall_time = start.elapsed();
    Ok(run)
}

/// Best of `cfg.restarts` kernelized Lloyd runs; the reported objective is
/// `tr(K B D B^T)`, which the iteration increases.
pub fn kernel_kmeans(kernel: &DenseMatrix, k: usize, cfg: &SolverConfig) -> Result<RunReport> {
    cfg.validate()?;
    check_kernel(kernel)?;
    let n = kernel.rows();
    check_k(k, n, "number of observations")?;
    let start = Instant::now();
    let dist = |i: usize, j: usize| kernel[(i, i)] + kernel[(j, j)] - 2.0 * kernel[(i, j)];
    let mut rng = rng(cfg.seed);
    let mut best: Option<RunReport> = None;
    for _ in 0..cfg.restarts {
        let seeds = plus_plus_seeds(&mut rng, n, k, dist);
        let init = nearest_seed(n, &seeds, dist);
        let run = kernel_run(kernel, init, k, cfg)?;
        if better_run(run.objective, best.as_ref().map(|b| b.objective), true) {
            best = Some(run);
        }
    }
    let mut best = best.expect("at least one restart");
    best.restarts_used = cfg.restarts;
    best.wall_time = start.elapsed();
    Ok(best)
}

pub fn kernel_kmeans_from_labels(
    kernel: &DenseMatrix,
    labels: &[usize],
    k: usize,
    cfg: &SolverConfig,
) -> Result<RunReport> {
    cfg.validate()?;
    check_kernel(kernel)?;
    check_k(k, kernel.rows(), "number of observations")?;
    check_labels(labels, kernel.rows(), k)?;
    let start = Instant::now();
    let mut run = kernel_run(kernel, labels.to_vec(), k, cfg)?;
    run.wall_time = start.elapsed();
    Ok(run)
}

fn check_kernel(kernel: &DenseMatrix) -> Result<()> {
    if !kernel.is_square() {
        return Err(Error::NotSquare {
            rows: kernel.rows(),
            cols: kernel.cols(),
        });
    }
    let (gap, i, j) = kernel.asymmetry();
    if gap > crate::linalg::SYMMETRY_TOL {
        return Err(Error::Affinity(format!(
            "kernel not symmetric at ({i}, {j}), gap {gap:e}"
        )));
    }
    Ok(())
}

fn check_labels(labels: &[usize], n: usize, k: usize) -> Result<()> {
    if labels.len() != n {
        return Err(Error::dim(format!(
            "{} labels for {n} observations",
            labels.len()
        )));
    }
    if let Some((index, &label)) = labels.iter().enumerate().find(|(_, &l)| l >= k) {
        return Err(Error::Label { index, label, k });
    }
    Ok(())
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// k-means++ seeding: the first seed is uniform, each next one is drawn with
/// probability proportional to its squared distance to the nearest seed.
fn plus_plus_seeds(
    rng: &mut Rng,
    n: usize,
    k: usize,
    dist: impl Fn(usize, usize) -> f64,
) -> Vec<usize> {
    let mut seeds = vec![rng.random_range(0..n)];
    let mut nearest: Vec<f64> = (0..n).map(|i| dist(i, seeds[0]).max(0.0)).collect();
    while seeds.len() < k {
        let total: f64 = nearest.iter().sum();
        let next = if total > 0.0 {
            let mut target = rng.random::<f64>() * total;
            let mut pick = None;
            for (i, &d) in nearest.iter().enumerate() {
                if d > 0.0 {
                    pick = Some(i);
                    if target < d {
                        break;
                    }
                    target -= d;
                }
            }
            pick.expect("positive total mass")
        } else {
            // every point coincides with a seed: pick an unused index
            let free: Vec<usize> = (0..n).filter(|i| !seeds.contains(i)).collect();
            free[rng.random_range(0..free.len())]
        };
        seeds.push(next);
        for (i, d) in nearest.iter_mut().enumerate() {
            *d = d.min(dist(i, next).max(0.0));
        }
    }
    seeds
}

fn nearest_seed(n: usize, seeds: &[usize], dist: impl Fn(usize, usize) -> f64) -> Vec<usize> {
    (0..n)
        .map(|i| {
            if let Some(c) = seeds.iter().position(|&s| s == i) {
                return c;
            }
            let mut best = 0;
            let mut best_d = dist(i, seeds[0]);
            for (c, &s) in seeds.iter().enumerate().skip(1) {
                let d = dist(i, s);
                if d < best_d {
                    best = c;
                    best_d = d;
                }
            }
            best
        })
        .collect()
}

/// Gives every empty cluster the point farthest from its assigned centre,
/// taken from a cluster that keeps at least one member.
fn repair_empty(labels: &mut [usize], dist_to_own: &mut [f64], k: usize) {
    let mut sizes = vec![0usize; k];
    for &l in labels.iter() {
        sizes[l] += 1;
    }
    for empty in 0..k {
        if sizes[empty] > 0 {
            continue;
        }
        let donor = (0..labels.len())
            .filter(|&i| sizes[labels[i]] > 1)
            .max_by(|&a, &b| dist_to_own[a].total_cmp(&dist_to_own[b]).then(b.cmp(&a)))
            .expect("k <= n leaves a cluster with two members");
        sizes[labels[donor]] -= 1;
        labels[donor] = empty;
        dist_to_own[donor] = 0.0;
        sizes[empty] = 1;
    }
}

/// Reassigns each point to its nearest centre; a point only moves when the
/// new centre is strictly closer.
fn reassign(
    labels: &[usize],
    k: usize,
    dist: impl Fn(usize, usize) -> f64,
) -> (Vec<usize>, Vec<f64>) {
    let mut out = labels.to_vec();
    let mut own = vec![0.0; labels.len()];
    for (i, &cur) in labels.iter().enumerate() {
        let mut best = cur;
        let mut best_d = dist(i, cur);
        for c in 0..k {
            let d = dist(i, c);
            if d < best_d {
                best = c;
                best_d = d;
            }
        }
        out[i] = best;
        own[i] = best_d;
    }
    (out, own)
}

fn lloyd_run(
    x: &DenseMatrix,
    xt: &DenseMatrix,
    mut labels: Vec<usize>,
    k: usize,
    cfg: &SolverConfig,
) -> Result<RunReport> {
    let n = x.cols();
    {
        let mut zeros = vec![0.0; n];
        repair_empty(&mut labels, &mut zeros, k);
    }
    let mut b = AssignmentMatrix::new(labels, k)?;
    let mut objective = kmeans_objective(x, &b)?;
    let mut trace = vec![objective];
    let mut iterations = 0;
    while iterations < cfg.max_iter {
        let mu = crate::cluster::centroids(x, &b)?.transpose();
        let (mut next, mut own) = reassign(b.labels(), k, |i, c| sq_dist(xt.row(i), mu.row(c)));
        repair_empty(&mut next, &mut own, k);
        if next == b.labels() {
            break;
        }
        iterations += 1;
        let cand = AssignmentMatrix::new(next, k)?;
        let obj = kmeans_objective(x, &cand)?;
        if obj > objective {
            // rounding-level increase: keep the previous partition
            break;
        }
        let done = cfg.converged(objective, obj);
        b = cand;
        objective = obj;
        trace.push(obj);
        if done {
            break;
        }
    }
    Ok(RunReport {
        labels: b.labels().to_vec(),
        objective,
        objective_trace: trace,
        iterations,
        wall_time: Default::default(),
        restarts_used: 1,
    })
}

/// Per-cluster kernel sums: `S[i][c] = Σ_{j∈C_c} K_ij` and the within-cluster
/// totals `Σ_{j,l∈C_c} K_jl`.
fn kernel_sums(kernel: &DenseMatrix, labels: &[usize], k: usize) -> (Vec<f64>, Vec<f64>) {
    let n = labels.len();
    let mut s = vec![0.0; n * k];
    for i in 0..n {
        let row = kernel.row(i);
        for (j, &l) in labels.iter().enumerate() {
            s[i * k + l] += row[j];
        }
    }
    let mut within = vec![0.0; k];
    for (j, &l) in labels.iter().enumerate() {
        within[l] += s[j * k + l];
    }
    (s, within)
}

fn kernel_objective(within: &[f64], sizes: &[usize]) -> f64 {
    within.iter().zip(sizes).map(|(&w, &s)| w / s as f64).sum()
}

fn kernel_run(
    kernel: &DenseMatrix,
    mut labels: Vec<usize>,
    k: usize,
    cfg: &SolverConfig,
) -> Result<RunReport> {
    let n = kernel.rows();
    {
        let mut zeros = vec![0.0; n];
        repair_empty(&mut labels, &mut zeros, k);
    }
    let mut b = AssignmentMatrix::new(labels, k)?;
    let (mut s, mut within) = kernel_sums(kernel, b.labels(), k);
    let mut objective = kernel_objective(&within, b.sizes());
    let mut trace = vec![objective];
    let mut iterations = 0;
    while iterations < cfg.max_iter {
        let sizes: Vec<f64> = b.sizes().iter().map(|&c| c as f64).collect();
        let dist = |i: usize, c: usize| {
            kernel[(i, i)] - 2.0 * s[i * k + c] / sizes[c] + within[c] / (sizes[c] * sizes[c])
        };
        let (mut next, mut own) = reassign(b.labels(), k, dist);
        repair_empty(&mut next, &mut own, k);
        if next == b.labels() {
            break;
        }
        iterations += 1;
        let cand = AssignmentMatrix::new(next, k)?;
        let (cs, cw) = kernel_sums(kernel, cand.labels(), k);
        let obj = kernel_objective(&cw, cand.sizes());
        if obj < objective {
            break;
        }
        let done = cfg.converged(objective, obj);
        b = cand;
        s = cs;
        within = cw;
        objective = obj;
        trace.push(obj);
        if done {
            break;
        }
    }
    Ok(RunReport {
        labels: b.labels().to_vec(),
        objective,
        objective_trace: trace,
        iterations,
        wall_time: Default::default(),
        restarts_used: 1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cluster::trace_affinity;

    fn line(points: &[f64]) -> DenseMatrix {
        DenseMatrix::new(1, points.len(), points.to_vec()).unwrap()
    }

    #[test]
    fn four_points_two_clusters() {
        let x = line(&[0.0, 0.1, 10.0, 10.1]);
        let r = lloyd(&x, 2, &SolverConfig::default()).unwrap();
        assert!((r.objective - 0.01).abs() < 1e-12);
        assert_eq!(r.labels[0], r.labels[1]);
        assert_eq!(r.labels[2], r.labels[3]);
        assert_ne!(r.labels[0], r.labels[2]);
    }

    #[test]
    fn k_equals_n() {
        let x = line(&[3.0, -1.0, 7.5, 0.25, 2.0]);
        let r = lloyd(&x, 5, &SolverConfig::default().with_restarts(2)).unwrap();
        assert_eq!(r.objective, 0.0);
        let mut l = r.labels.clone();
        l.sort();
        assert_eq!(l, vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn too_many_clusters() {
        let x = line(&[1.0, 2.0]);
        assert!(matches!(
            lloyd(&x, 3, &SolverConfig::default()),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn repairs_empty_initial_cluster() {
        let x = line(&[0.0, 1.0, 9.0, 10.0]);
        let r = lloyd_from_labels(&x, &[0, 0, 0, 0], 2, &SolverConfig::default()).unwrap();
        assert!((r.objective - 1.0).abs() < 1e-12);
    }

    #[test]
    fn kernel_blocks() {
        let kmat = DenseMatrix::from_fn(6, 6, |i, j| if i / 3 == j / 3 { 1.0 } else { 0.0 });
        let r = kernel_kmeans(&kmat, 2, &SolverConfig::default()).unwrap();
        assert_eq!(r.objective, 6.0);
        assert_eq!(r.labels[0], r.labels[2]);
        assert_ne!(r.labels[0], r.labels[3]);
        let b = AssignmentMatrix::new(r.labels.clone(), 2).unwrap();
        assert!((trace_affinity(&kmat, &b).unwrap() - r.objective).abs() < 1e-12);
    }

    #[test]
    fn kernel_rejects_asymmetric() {
        let kmat = DenseMatrix::from_rows(&[vec![1.0, 0.3], vec![0.0, 1.0]]).unwrap();
        assert!(matches!(
            kernel_kmeans(&kmat, 1, &SolverConfig::default()),
            Err(Error::Affinity(_))
        ));
    }
}
