//! Independent reference computations for the integration tests. Everything
//! here works on plain `Vec<Vec<f64>>` rows so it shares no code with the
//! library's matrix kernels.
#![allow(dead_code, clippy::needless_range_loop)]

use mfclust::DenseMatrix;
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

pub type Rows = Vec<Vec<f64>>;

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn rows_of(m: &DenseMatrix) -> Rows {
    (0..m.rows()).map(|i| m.row(i).to_vec()).collect()
}

pub fn dense(rows: &Rows) -> DenseMatrix {
    DenseMatrix::from_rows(rows).unwrap()
}

pub fn random_rows(rng: &mut StdRng, m: usize, n: usize, lo: f64, hi: f64) -> Rows {
    (0..m)
        .map(|_| (0..n).map(|_| rng.random_range(lo..hi)).collect())
        .collect()
}

pub fn random_matrix(rng: &mut StdRng, m: usize, n: usize, lo: f64, hi: f64) -> DenseMatrix {
    dense(&random_rows(rng, m, n, lo, hi))
}

pub fn gaussian(rng: &mut StdRng) -> f64 {
    // Box-Muller
    let u: f64 = 1.0 - rng.random::<f64>();
    let v: f64 = rng.random();
    (-2.0 * u.ln()).sqrt() * (2.0 * std::f64::consts::PI * v).cos()
}

/// Labels covering every cluster at least once, in random order.
pub fn random_labels(rng: &mut StdRng, n: usize, k: usize) -> Vec<usize> {
    assert!(n >= k);
    let mut l: Vec<usize> = (0..n)
        .map(|i| if i < k { i } else { rng.random_range(0..k) })
        .collect();
    l.shuffle(rng);
    l
}

pub fn random_symmetric(rng: &mut StdRng, n: usize) -> DenseMatrix {
    let a = random_rows(rng, n, n, -1.0, 1.0);
    dense(
        &(0..n)
            .map(|i| (0..n).map(|j| a[i][j] + a[j][i]).collect())
            .collect(),
    )
}

pub fn random_affinity(rng: &mut StdRng, n: usize) -> DenseMatrix {
    let a = random_rows(rng, n, n, 0.0, 1.0);
    dense(
        &(0..n)
            .map(|i| (0..n).map(|j| 0.5 * (a[i][j] + a[j][i])).collect())
            .collect(),
    )
}

pub fn transpose(a: &Rows) -> Rows {
    (0..a[0].len())
        .map(|j| a.iter().map(|r| r[j]).collect())
        .collect()
}

pub fn mul(a: &Rows, b: &Rows) -> Rows {
    let (p, q, r) = (a.len(), b.len(), b[0].len());
    assert_eq!(a[0].len(), q);
    let mut out = vec![vec![0.0; r]; p];
    for i in 0..p {
        for j in 0..r {
            let mut s = 0.0;
            for t in 0..q {
                s += a[i][t] * b[t][j];
            }
            out[i][j] = s;
        }
    }
    out
}

pub fn trace(a: &Rows) -> f64 {
    (0..a.len()).map(|i| a[i][i]).sum()
}

pub fn frob_sq(a: &Rows) -> f64 {
    a.iter().flatten().map(|v| v * v).sum()
}

pub fn diff_sq(a: &Rows, b: &Rows) -> f64 {
    a.iter()
        .flatten()
        .zip(b.iter().flatten())
        .map(|(x, y)| (x - y) * (x - y))
        .sum()
}

pub fn max_abs_diff(a: &DenseMatrix, b: &DenseMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.as_slice()
        .iter()
        .zip(b.as_slice())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}

/// Least squares `min ||A x - b||` by modified Gram-Schmidt QR. `A` must have
/// full column rank.
pub fn lstsq_qr(a: &Rows, b: &[f64]) -> Vec<f64> {
    let (p, q) = (a.len(), a[0].len());
    let mut cols: Vec<Vec<f64>> = (0..q).map(|j| (0..p).map(|i| a[i][j]).collect()).collect();
    let mut r = vec![vec![0.0; q]; q];
    for j in 0..q {
        for i in 0..j {
            let d: f64 = (0..p).map(|t| cols[i][t] * cols[j][t]).sum();
            r[i][j] = d;
            for t in 0..p {
                cols[j][t] -= d * cols[i][t];
            }
        }
        let norm = cols[j].iter().map(|v| v * v).sum::<f64>().sqrt();
        r[j][j] = norm;
        for v in &mut cols[j] {
            *v /= norm;
        }
    }
    let qtb: Vec<f64> = (0..q)
        .map(|j| (0..p).map(|t| cols[j][t] * b[t]).sum())
        .collect();
    let mut x = vec![0.0; q];
    for j in (0..q).rev() {
        let s: f64 = (j + 1..q).map(|t| r[j][t] * x[t]).sum();
        x[j] = (qtb[j] - s) / r[j][j];
    }
    x
}

pub fn residual_sq(a: &Rows, x: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(row, bi)| {
            let v: f64 = row.iter().zip(x).map(|(u, w)| u * w).sum();
            (v - bi) * (v - bi)
        })
        .sum()
}

/// Exhaustive NNLS: the optimum is the unconstrained least-squares solution
/// on some support set that happens to be nonnegative.
pub fn nnls_bruteforce(a: &Rows, b: &[f64]) -> (Vec<f64>, f64) {
    let q = a[0].len();
    let mut best = (vec![0.0; q], b.iter().map(|v| v * v).sum::<f64>());
    for mask in 1u32..(1 << q) {
        let support: Vec<usize> = (0..q).filter(|j| mask & (1 << j) != 0).collect();
        let sub: Rows = a
            .iter()
            .map(|r| support.iter().map(|&j| r[j]).collect())
            .collect();
        let xs = lstsq_qr(&sub, b);
        if xs.iter().any(|v| !v.is_finite() || *v < 0.0) {
            continue;
        }
        let mut x = vec![0.0; q];
        for (&j, &v) in support.iter().zip(&xs) {
            x[j] = v;
        }
        let f = residual_sq(a, &x, b);
        if f < best.1 {
            best = (x, f);
        }
    }
    best
}

/// Random m x k matrix with orthonormal columns.
pub fn random_orthonormal(rng: &mut StdRng, m: usize, k: usize) -> Rows {
    let mut cols: Vec<Vec<f64>> = Vec::new();
    while cols.len() < k {
        let mut v: Vec<f64> = (0..m).map(|_| gaussian(rng)).collect();
        for _ in 0..2 {
            for c in &cols {
                let d: f64 = v.iter().zip(c).map(|(a, b)| a * b).sum();
                for (x, y) in v.iter_mut().zip(c) {
                    *x -= d * y;
                }
            }
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-6 {
            cols.push(v.into_iter().map(|x| x / norm).collect());
        }
    }
    transpose(&cols)
}

/// Column means per cluster, by explicit loops. `x` holds one observation
/// per column.
pub fn loop_centroids(x: &Rows, labels: &[usize], k: usize) -> Rows {
    let m = x.len();
    let mut sums = vec![vec![0.0; k]; m];
    let mut counts = vec![0usize; k];
    for (j, &l) in labels.iter().enumerate() {
        counts[l] += 1;
        for i in 0..m {
            sums[i][l] += x[i][j];
        }
    }
    for row in &mut sums {
        for (v, &c) in row.iter_mut().zip(&counts) {
            *v /= c as f64;
        }
    }
    sums
}

pub fn loop_sse(x: &Rows, labels: &[usize], k: usize) -> f64 {
    let c = loop_centroids(x, labels, k);
    let mut s = 0.0;
    for (j, &l) in labels.iter().enumerate() {
        for i in 0..x.len() {
            s += (x[i][j] - c[i][l]).powi(2);
        }
    }
    s
}

/// Minimum SSE over all partitions of the columns into two nonempty groups.
pub fn best_two_partition(x: &Rows) -> (Vec<usize>, f64) {
    let n = x[0].len();
    assert!(n <= 20);
    let mut best = (vec![], f64::INFINITY);
    // fix point 0 in cluster 0 to skip mirrored labelings
    for mask in 0u32..(1 << (n - 1)) {
        let labels: Vec<usize> = (0..n)
            .map(|j| {
                if j == 0 {
                    0
                } else {
                    ((mask >> (j - 1)) & 1) as usize
                }
            })
            .collect();
        if !labels.contains(&1) {
            continue;
        }
        let f = loop_sse(x, &labels, 2);
        if f < best.1 {
            best = (labels, f);
        }
    }
    best
}

/// True when `a` equals `b` up to a renaming of cluster ids.
pub fn same_partition(a: &[usize], b: &[usize]) -> bool {
    use std::collections::HashMap;
    if a.len() != b.len() {
        return false;
    }
    let mut fwd = HashMap::new();
    let mut back = HashMap::new();
    a.iter()
        .zip(b)
        .all(|(x, y)| *fwd.entry(x).or_insert(y) == y && *back.entry(y).or_insert(x) == x)
}

/// Relative per-step violations of a non-increasing (or, with `ascending`,
/// non-decreasing) sequence.
pub fn worst_violation(trace: &[f64], ascending: bool) -> f64 {
    trace
        .windows(2)
        .map(|w| {
            let rise = if ascending { w[0] - w[1] } else { w[1] - w[0] };
            rise.max(0.0) / w[0].abs().max(1e-300)
        })
        .fold(0.0, f64::max)
}
