//! External clustering quality: purity, NMI and best-match accuracy.

use std::collections::HashMap;

use itertools::Itertools;

use crate::error::{Error, Result};

/// Dense contingency table over the distinct labels of each side.
struct Contingency {
    counts: Vec<Vec<usize>>,
    n: usize,
}

impl Contingency {
    fn new(pred: &[usize], truth: &[usize]) -> Result<Self> {
        if pred.len() != truth.len() {
            return Err(Error::dim(format!(
                "{} predicted labels vs {} true labels",
                pred.len(),
                truth.len()
            )));
        }
        if pred.is_empty() {
            return Err(Error::dim("empty label vectors"));
        }
        let index = |labels: &[usize]| -> (Vec<usize>, usize) {
            let mut map = HashMap::new();
            let ids = labels
                .iter()
                .map(|l| {
                    let next = map.len();
                    *map.entry(*l).or_insert(next)
                })
                .collect();
            (ids, map.len())
        };
        let (p, kp) = index(pred);
        let (t, kt) = index(truth);
        let mut counts = vec![vec![0; kt]; kp];
        for (&a, &b) in p.iter().zip(&t) {
            counts[a][b] += 1;
        }
        Ok(Self {
            counts,
            n: pred.len(),
        })
    }

    fn row_sums(&self) -> Vec<usize> {
        self.counts.iter().map(|r| r.iter().sum()).collect()
    }

    fn col_sums(&self) -> Vec<usize> {
        (0..self.counts[0].len())
            .map(|j| self.counts.iter().map(|r| r[j]).sum())
            .collect()
    }
}

fn entropy(sizes: &[usize], n: usize) -> f64 {
    let n = n as f64;
    sizes
        .iter()
        .filter(|&&s| s > 0)
        .map(|&s| {
            let p = s as f64 / n;
            -p * p.ln()
        })
        .sum()
}

/// Fraction of points whose predicted cluster's majority class matches their
/// own class.
pub fn purity(pred: &[usize], truth: &[usize]) -> Result<f64> {
    let c = Contingency::new(pred, truth)?;
    let hits: usize = c
        .counts
        .iter()
        .map(|r| *r.iter().max().expect("nonempty"))
        .sum();
    Ok(hits as f64 / c.n as f64)
}

/// Mutual information over the arithmetic mean of the two entropies; 0 when
/// either side has a single cluster.
pub fn nmi(pred: &[usize], truth: &[usize]) -> Result<f64> {
    let c = Contingency::new(pred, truth)?;
    let (rows, cols) = (c.row_sums(), c.col_sums());
    if rows.len() < 2 || cols.len() < 2 {
        return Ok(0.0);
    }
    let n = c.n as f64;
    let mut mi = 0.0;
    for (i, r) in c.counts.iter().enumerate() {
        for (j, &nij) in r.iter().enumerate() {
            if nij > 0 {
                let nij = nij as f64;
                mi += nij / n * (n * nij / (rows[i] as f64 * cols[j] as f64)).ln();
            }
        }
    }
    let denom = 0.5 * (entropy(&rows, c.n) + entropy(&cols, c.n));
    Ok((mi / denom).clamp(0.0, 1.0))
}

/// Largest number of distinct predicted labels accepted by
/// [`best_match_accuracy`].
pub const MAX_MATCH_CLUSTERS: usize = 8;

/// Fraction of points on which `pred` agrees with `truth` under the best
/// one-to-one relabeling of `pred` (exhaustive over permutations).
pub fn best_match_accuracy(pred: &[usize], truth: &[usize]) -> Result<f64> {
    let c = Contingency::new(pred, truth)?;
    let kp = c.counts.len();
    let kt = c.counts[0].len();
    if kp > MAX_MATCH_CLUSTERS || kt > MAX_MATCH_CLUSTERS {
        return Err(Error::config(format!(
            "best-match accuracy is limited to {MAX_MATCH_CLUSTERS} clusters per side"
        )));
    }
    let k = kp.max(kt);
    let cell = |i: usize, j: usize| if i < kp && j < kt { c.counts[i][j] } else { 0 };
    let best = (0..k)
        .permutations(k)
        .map(|perm| {
            perm.iter()
                .enumerate()
                .map(|(i, &j)| cell(i, j))
                .sum::<usize>()
        })
        .max()
        .unwrap_or(0);
    Ok(best as f64 / c.n as f64)
}
