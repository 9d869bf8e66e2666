//! Cluster-indicator algebra.
//!
//! A hard clustering of `n` observations into `k` clusters is the binary
//! indicator `B` (n x k). With `D = diag(1/|C_j|)`, `XBD` holds the cluster
//! centroids and `G = B D^{1/2}` has orthonormal columns. The k-means
//! objective can then be evaluated three ways: directly as within-cluster
//! squared error, as the residual `||X - X B D B^T||_F^2`, and in trace form
//! `tr(X^T X) - tr(X^T X B D B^T)`.

use crate::error::{Error, Result};
use crate::linalg::{frobenius_dist_sq, gram, trace, DenseMatrix};

/// Hard cluster membership, stored as a label vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AssignmentMatrix {
    labels: Vec<usize>,
    k: usize,
    sizes: Vec<usize>,
}

impl AssignmentMatrix {
    /// Validates labels against `k`; every cluster must be non-empty.
    pub fn new(labels: Vec<usize>, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::config("k must be at least 1"));
        }
        if labels.is_empty() {
            return Err(Error::dim("no observations"));
        }
        let mut sizes = vec![0; k];
        for (index, &label) in labels.iter().enumerate() {
            if label >= k {
                return Err(Error::Label { index, label, k });
            }
            sizes[label] += 1;
        }
        if let Some(j) = sizes.iter().position(|&s| s == 0) {
            return Err(Error::EmptyCluster(j));
        }
        Ok(Self { labels, k, sizes })
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    /// Cluster cardinalities `|C_j|`.
    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    /// Members of cluster `j`, in observation order.
    pub fn members(&self, j: usize) -> Vec<usize> {
        self.labels
            .iter()
            .enumerate()
            .filter_map(|(i, &l)| (l == j).then_some(i))
            .collect()
    }

    /// The dense binary indicator `B`.
    pub fn to_dense(&self) -> DenseMatrix {
        DenseMatrix::from_fn(self.n(), self.k, |i, j| {
            if self.labels[i] == j {
                1.0
            } else {
                0.0
            }
        })
    }
}

/// `D = diag(1 / |C_j|)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingMatrix {
    pub diag: Vec<f64>,
}

impl ScalingMatrix {
    pub fn sqrt(&self) -> Vec<f64> {
        self.diag.iter().map(|d| d.sqrt()).collect()
    }

    pub fn to_dense(&self) -> DenseMatrix {
        DenseMatrix::from_diag(&self.diag)
    }
}

/// `G = B D^{1/2}`, or a relaxed nonnegative stand-in produced by a solver.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedIndicator {
    pub g: DenseMatrix,
}

pub fn build_assignment(labels: &[usize], k: usize) -> Result<AssignmentMatrix> {
    AssignmentMatrix::new(labels.to_vec(), k)
}

pub fn scaling(b: &AssignmentMatrix) -> ScalingMatrix {
    ScalingMatrix {
        diag: b.sizes.iter().map(|&s| 1.0 / s as f64).collect(),
    }
}

pub fn normalized_indicator(b: &AssignmentMatrix) -> NormalizedIndicator {
    NormalizedIndicator {
        g: b.to_dense().scale_columns(&scaling(b).sqrt()),
    }
}

fn check_columns(x: &DenseMatrix, b: &AssignmentMatrix) -> Result<()> {
    if x.cols() != b.n() {
        return Err(Error::dim(format!(
            "data has {} observations but the assignment covers {}",
            x.cols(),
            b.n()
        )));
    }
    Ok(())
}

/// Column `j` is the mean of the observations in cluster `j` (`X B D`).
pub fn centroids(x: &DenseMatrix, b: &AssignmentMatrix) -> Result<DenseMatrix> {
    check_columns(x, b)?;
    let mut sums = DenseMatrix::zeros(x.rows(), b.k());
    for (obs, &label) in b.labels.iter().enumerate() {
        for f in 0..x.rows() {
            sums.set(f, label, sums[(f, label)] + x[(f, obs)]);
        }
    }
    Ok(sums.scale_columns(&scaling(b).diag))
}

/// Within-cluster sum of squared distances to the centroids.
pub fn kmeans_objective(x: &DenseMatrix, b: &AssignmentMatrix) -> Result<f64> {
    let mu = centroids(x, b)?;
    let mut sse = 0.0;
    for (obs, &label) in b.labels.iter().enumerate() {
        for f in 0..x.rows() {
            let d = x[(f, obs)] - mu[(f, label)];
            sse += d * d;
        }
    }
    Ok(sse)
}

/// `||X - X B D B^T||_F^2`, evaluated through the matrix products.
pub fn kmeans_objective_factorized(x: &DenseMatrix, b: &AssignmentMatrix) -> Result<f64> {
    check_columns(x, b)?;
    let bd = b.to_dense();
    let xbd = x.matmul(&bd)?.scale_columns(&scaling(b).diag);
    let approx = xbd.matmul_t(&bd)?;
    frobenius_dist_sq(x, &approx)
}

/// `tr(X^T X) - tr(X^T X B D B^T)`.
pub fn trace_objective(x: &DenseMatrix, b: &AssignmentMatrix) -> Result<f64> {
    check_columns(x, b)?;
    let k = gram(x);
    Ok(trace(&k)? - trace_affinity(&k, b)?)
}

/// `tr(A B D B^T)` for an n x n affinity (or kernel) matrix.
pub fn trace_affinity(a: &DenseMatrix, b: &AssignmentMatrix) -> Result<f64> {
    if !a.is_square() || a.rows() != b.n() {
        return Err(Error::dim(format!(
            "affinity is {}x{} but the assignment covers {} observations",
            a.rows(),
            a.cols(),
            b.n()
        )));
    }
    let bd = b.to_dense();
    let abd = a.matmul(&bd)?.scale_columns(&scaling(b).diag);
    trace(&abd.matmul_t(&bd)?)
}

pub(crate) fn check_affinity(a: &DenseMatrix) -> Result<()> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let (gap, i, j) = a.asymmetry();
    if gap > crate::linalg::SYMMETRY_TOL {
        return Err(Error::Affinity(format!(
            "not symmetric at ({i}, {j}), gap {gap:e}"
        )));
    }
    if let Some((i, j, v)) = a.find_negative() {
        return Err(Error::Affinity(format!("negative entry {v} at ({i}, {j})")));
    }
    Ok(())
}

fn cluster_volumes(a: &DenseMatrix, b: &AssignmentMatrix) -> Result<Vec<f64>> {
    check_affinity(a)?;
    if a.rows() != b.n() {
        return Err(Error::dim(format!(
            "affinity is {}x{} but the assignment covers {}",
            a.rows(),
            a.cols(),
            b.n()
        )));
    }
    let degrees = a.row_sums();
    let mut vol = vec![0.0; b.k()];
    for (i, &l) in b.labels.iter().enumerate() {
        vol[l] += degrees[i];
    }
    if let Some(p) = vol.iter().position(|&v| v <= 0.0) {
        return Err(Error::Volume(p));
    }
    Ok(vol)
}

/// Normalized cut: for every pair of clusters, the cross-cluster affinity
/// divided by the volume of each side in turn.
pub fn ncut_objective(a: &DenseMatrix, b: &AssignmentMatrix) -> Result<f64> {
    let vol = cluster_volumes(a, b)?;
    let k = b.k();
    let mut cut = vec![0.0; k * k];
    for i in 0..b.n() {
        let p = b.labels[i];
        for (mu, &q) in b.labels.iter().enumerate() {
            if p < q {
                cut[p * k + q] += a[(i, mu)];
            }
        }
    }
    let mut total = 0.0;
    for p in 0..k {
        for q in p + 1..k {
            let c = cut[p * k + q];
            total += c / vol[p] + c / vol[q];
        }
    }
    Ok(total)
}

/// Normalized cut in indicator form, `K - Σ_l (b_l^T A b_l) / (b_l^T Δ b_l)`.
pub fn ncut_objective_vectorized(a: &DenseMatrix, b: &AssignmentMatrix) -> Result<f64> {
    let vol = cluster_volumes(a, b)?;
    let bd = b.to_dense();
    let ab = a.matmul(&bd)?;
    let mut total = b.k() as f64;
    for l in 0..b.k() {
        let within: f64 = (0..b.n()).map(|i| bd[(i, l)] * ab[(i, l)]).sum();
        total -= within / vol[l];
    }
    Ok(total)
}

/// Which axis of a factor matrix indexes observations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    /// One observation per row (n x k, e.g. `G`).
    Rows,
    /// One observation per column (k x n, e.g. `H`).
    Cols,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorLabels {
    pub labels: Vec<usize>,
    /// Observations whose encoding vector was entirely zero; they were
    /// assigned to cluster 0.
    pub degenerate: Vec<usize>,
}

/// Argmax cluster extraction; ties go to the lowest index.
pub fn labels_from_factor(h: &DenseMatrix, orientation: Orientation) -> FactorLabels {
    let (n, k) = match orientation {
        Orientation::Rows => (h.rows(), h.cols()),
        Orientation::Cols => (h.cols(), h.rows()),
    };
    let entry = |obs: usize, c: usize| match orientation {
        Orientation::Rows => h[(obs, c)],
        Orientation::Cols => h[(c, obs)],
    };
    let mut labels = Vec::with_capacity(n);
    let mut degenerate = Vec::new();
    for obs in 0..n {
        let mut best = 0;
        let mut best_val = entry(obs, 0);
        let mut all_zero = best_val == 0.0;
        for c in 1..k {
            let v = entry(obs, c);
            all_zero &= v == 0.0;
            if v > best_val {
                best = c;
                best_val = v;
            }
        }
        if all_zero {
            degenerate.push(obs);
        }
        labels.push(best);
    }
    FactorLabels { labels, degenerate }
}
