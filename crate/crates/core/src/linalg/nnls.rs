//! Nonnegative least squares by the Lawson–Hanson active-set method.
//!
//! Each right-hand side is solved independently on the normal equations
//! `A^T A x = A^T b`, so the Gram matrix is formed once for a batch.

use super::solve::{cholesky_solve_in_place, cholesky_with_ridge};
use super::DenseMatrix;
use crate::error::{Error, Result};

/// `argmin_{X >= 0} ||A X - B||_F^2`, column by column.
pub fn nnls(a: &DenseMatrix, b: &DenseMatrix) -> Result<DenseMatrix> {
    if a.rows() != b.rows() {
        return Err(Error::dim(format!(
            "nnls: A is {}x{} but B is {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    let ata = a.t_matmul(a)?;
    let atb = a.t_matmul(b)?;
    Ok(nnls_normal(&ata, &atb))
}

/// NNLS given the precomputed `A^T A` (q x q) and `A^T B` (q x r).
pub fn nnls_normal(ata: &DenseMatrix, atb: &DenseMatrix) -> DenseMatrix {
    let q = ata.rows();
    assert!(ata.is_square() && atb.rows() == q);
    let mut solver = ActiveSet::new(ata);
    let mut out = DenseMatrix::zeros(q, atb.cols());
    let mut rhs = vec![0.0; q];
    for j in 0..atb.cols() {
        for (i, v) in rhs.iter_mut().enumerate() {
            *v = atb[(i, j)];
        }
        let x = solver.solve(&rhs);
        for (i, &v) in x.iter().enumerate() {
            out.set(i, j, v);
        }
    }
    out
}

struct ActiveSet<'a> {
    ata: &'a DenseMatrix,
    q: usize,
    scale: f64,
    // scratch
    sub: Vec<f64>,
    z: Vec<f64>,
}

impl<'a> ActiveSet<'a> {
    fn new(ata: &'a DenseMatrix) -> Self {
        let q = ata.rows();
        Self {
            ata,
            q,
            scale: ata.max_abs(),
            sub: Vec::with_capacity(q * q),
            z: Vec::with_capacity(q),
        }
    }

    fn gradient_gap(&self, rhs: &[f64], x: &[f64], w: &mut [f64]) {
        for i in 0..self.q {
            let ax: f64 = self.ata.row(i).iter().zip(x).map(|(a, b)| a * b).sum();
            w[i] = rhs[i] - ax;
        }
    }

    /// Unconstrained solve restricted to the passive set; returns values in
    /// passive-set order.
    fn passive_solve(&mut self, passive: &[usize], rhs: &[f64]) {
        let p = passive.len();
        self.sub.clear();
        for &i in passive {
            for &j in passive {
                self.sub.push(self.ata[(i, j)]);
            }
        }
        let l = cholesky_with_ridge(&self.sub, p);
        self.z.clear();
        self.z.extend(passive.iter().map(|&i| rhs[i]));
        cholesky_solve_in_place(&l, p, &mut self.z);
    }

    fn solve(&mut self, rhs: &[f64]) -> Vec<f64> {
        let q = self.q;
        let rhs_scale = rhs.iter().fold(0.0, |m: f64, v| m.max(v.abs()));
        let tol = 10.0 * f64::EPSILON * (q as f64) * (self.scale + rhs_scale);
        let mut x = vec![0.0; q];
        let mut passive: Vec<usize> = Vec::with_capacity(q);
        let mut in_passive = vec![false; q];
        let mut w = vec![0.0; q];
        self.gradient_gap(rhs, &x, &mut w);

        for _ in 0..3 * q {
            let entering = (0..q)
                .filter(|&j| !in_passive[j] && w[j] > tol)
                .max_by(|&i, &j| w[i].total_cmp(&w[j]));
            let Some(j) = entering else { break };
            passive.push(j);
            in_passive[j] = true;

            loop {
                self.passive_solve(&passive, rhs);
                if self.z.iter().all(|&v| v > 0.0) {
                    for (k, &i) in passive.iter().enumerate() {
                        x[i] = self.z[k];
                    }
                    break;
                }
                // step back toward the feasible region until a passive
                // variable hits its bound
                let mut alpha = f64::INFINITY;
                let mut blocking = passive[0];
                for (k, &i) in passive.iter().enumerate() {
                    if self.z[k] <= 0.0 {
                        let ratio = x[i] / (x[i] - self.z[k]);
                        if ratio < alpha {
                            alpha = ratio;
                            blocking = i;
                        }
                    }
                }
                for (k, &i) in passive.iter().enumerate() {
                    x[i] += alpha * (self.z[k] - x[i]);
                }
                x[blocking] = 0.0;
                passive.retain(|&i| {
                    let keep = x[i] > 0.0;
                    if !keep {
                        x[i] = 0.0;
                        in_passive[i] = false;
                    }
                    keep
                });
                if passive.is_empty() {
                    break;
                }
            }
            if !in_passive[j] {
                // the entering variable cannot stay positive, so its
                // gradient signal was rounding noise
                break;
            }
            self.gradient_gap(rhs, &x, &mut w);
        }
        x
    }
}
