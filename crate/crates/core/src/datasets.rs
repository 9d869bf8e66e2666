//! Seeded synthetic data: Gaussian blobs and concentric circles.

use std::f64::consts::PI;

use rand::Rng as _;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;
use crate::solver::rng;

/// Generator name, parameters and seed, in the order they were given.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetMeta {
    pub generator: String,
    pub params: Vec<(String, String)>,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    /// m x n, one observation per column.
    pub x: DenseMatrix,
    pub labels: Vec<usize>,
    pub k: usize,
    pub meta: DatasetMeta,
}

#[derive(Debug, Clone, PartialEq)]
pub enum BlobCenters {
    /// One point per cluster, all of the same dimension.
    Explicit(Vec<Vec<f64>>),
    /// `spread * e_j` for cluster `j` in `dim >= k` dimensions.
    Axes { spread: f64, dim: usize },
    /// Evenly spaced on a circle of radius `spread` in the plane.
    Circle { spread: f64 },
    /// On the real line, `2 * spread` apart and centred at zero.
    Line { spread: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlobsConfig {
    pub n: usize,
    pub k: usize,
    pub centers: BlobCenters,
    pub sigma: f64,
    pub seed: u64,
    /// Subtract each feature's minimum so every entry is `>= 0`.
    pub nonnegative: bool,
}

impl BlobsConfig {
    /// Centres on the coordinate axes of `R^k`.
    pub fn new(n: usize, k: usize, spread: f64, sigma: f64, seed: u64) -> Self {
        Self {
            n,
            k,
            centers: BlobCenters::Axes { spread, dim: k },
            sigma,
            seed,
            nonnegative: false,
        }
    }

    fn center_points(&self) -> Result<Vec<Vec<f64>>> {
        match &self.centers {
            BlobCenters::Explicit(c) => {
                if c.len() != self.k {
                    return Err(Error::config(format!(
                        "{} centres for k = {}",
                        c.len(),
                        self.k
                    )));
                }
                let dim = c[0].len();
                if dim == 0 || c.iter().any(|p| p.len() != dim) {
                    return Err(Error::config("centres must share a nonzero dimension"));
                }
                if c.iter().flatten().any(|v| !v.is_finite()) {
                    return Err(Error::config("centres must be finite"));
                }
                Ok(c.clone())
            }
            &BlobCenters::Axes { spread, dim } => {
                check_spread(spread)?;
                if dim < self.k {
                    return Err(Error::config(format!(
                        "axes layout needs dim >= k = {}",
                        self.k
                    )));
                }
                Ok((0..self.k)
                    .map(|j| {
                        (0..dim)
                            .map(|i| if i == j { spread } else { 0.0 })
                            .collect()
                    })
                    .collect())
            }
            &BlobCenters::Circle { spread } => {
                check_spread(spread)?;
                Ok((0..self.k)
                    .map(|j| {
                        let t = 2.0 * PI * j as f64 / self.k as f64;
                        vec![spread * t.cos(), spread * t.sin()]
                    })
                    .collect())
            }
            &BlobCenters::Line { spread } => {
                check_spread(spread)?;
                Ok((0..self.k)
                    .map(|j| vec![spread * (2.0 * j as f64 - (self.k as f64 - 1.0))])
                    .collect())
            }
        }
    }
}

fn check_spread(spread: f64) -> Result<()> {
    if spread.is_finite() {
        Ok(())
    } else {
        Err(Error::config("spread must be finite"))
    }
}

/// Balanced contiguous label blocks whose sizes differ by at most one.
fn balanced_labels(n: usize, k: usize) -> Vec<usize> {
    let (base, extra) = (n / k, n % k);
    (0..k)
        .flat_map(|j| std::iter::repeat_n(j, base + usize::from(j < extra)))
        .collect()
}

pub fn make_blobs(cfg: &BlobsConfig) -> Result<LabeledDataset> {
    if cfg.k < 1 || cfg.n < cfg.k {
        return Err(Error::config(format!(
            "blobs need n >= k >= 1 (n = {}, k = {})",
            cfg.n, cfg.k
        )));
    }
    if !cfg.sigma.is_finite() || cfg.sigma <= 0.0 {
        return Err(Error::config("sigma must be positive"));
    }
    let centers = cfg.center_points()?;
    let dim = centers[0].len();
    let labels = balanced_labels(cfg.n, cfg.k);
    let mut rng = rng(cfg.seed);
    let mut cols = Vec::with_capacity(cfg.n);
    for &l in &labels {
        let col: Vec<f64> = centers[l]
            .iter()
            .map(|&c| c + cfg.sigma * rng.sample::<f64, _>(StandardNormal))
            .collect();
        cols.push(col);
    }
    let mut x = DenseMatrix::from_columns(&cols)?;
    if cfg.nonnegative {
        let mins: Vec<f64> = (0..dim)
            .map(|i| x.row(i).iter().copied().fold(f64::INFINITY, f64::min))
            .collect();
        for (i, &lo) in mins.iter().enumerate() {
            x.row_mut(i)
                .iter_mut()
                .for_each(|v| *v = (*v - lo).max(0.0));
        }
    }
    let centers_desc = match &cfg.centers {
        BlobCenters::Explicit(c) => format!("explicit:{c:?}"),
        BlobCenters::Axes { spread, dim } => format!("axes:{spread}:{dim}"),
        BlobCenters::Circle { spread } => format!("circle:{spread}"),
        BlobCenters::Line { spread } => format!("line:{spread}"),
    };
    Ok(LabeledDataset {
        x,
        labels,
        k: cfg.k,
        meta: DatasetMeta {
            generator: "blobs".into(),
            params: vec![
                ("n".into(), cfg.n.to_string()),
                ("k".into(), cfg.k.to_string()),
                ("centers".into(), centers_desc),
                ("sigma".into(), cfg.sigma.to_string()),
                ("nonnegative".into(), cfg.nonnegative.to_string()),
            ],
            seed: cfg.seed,
        },
    })
}

/// Two concentric rings in the plane, outer radius 1, inner radius
/// `radius_ratio`. Angles are evenly spaced per ring; `noise` is the standard
/// deviation of the Gaussian jitter added to each coordinate. Label 0 is the
/// outer ring.
pub fn make_circles(n: usize, radius_ratio: f64, noise: f64, seed: u64) -> Result<LabeledDataset> {
    if n < 4 {
        return Err(Error::config(format!("circles need n >= 4, got {n}")));
    }
    if !(radius_ratio > 0.0 && radius_ratio < 1.0) {
        return Err(Error::config("radius_ratio must be in (0,1)"));
    }
    if !noise.is_finite() || noise < 0.0 {
        return Err(Error::config("noise must be nonnegative"));
    }
    let labels = balanced_labels(n, 2);
    let outer = labels.iter().filter(|&&l| l == 0).count();
    let mut rng = rng(seed);
    let mut cols = Vec::with_capacity(n);
    for (i, &l) in labels.iter().enumerate() {
        let (idx, count, r) = if l == 0 {
            (i, outer, 1.0)
        } else {
            (i - outer, n - outer, radius_ratio)
        };
        let t = 2.0 * PI * idx as f64 / count as f64;
        let mut p = vec![r * t.cos(), r * t.sin()];
        if noise > 0.0 {
            for v in &mut p {
                *v += noise * rng.sample::<f64, _>(StandardNormal);
            }
        }
        cols.push(p);
    }
    Ok(LabeledDataset {
        x: DenseMatrix::from_columns(&cols)?,
        labels,
        k: 2,
        meta: DatasetMeta {
            generator: "circles".into(),
            params: vec![
                ("n".into(), n.to_string()),
                ("radius_ratio".into(), radius_ratio.to_string()),
                ("noise".into(), noise.to_string()),
            ],
            seed,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tiny_sigma_hugs_centres() {
        let cfg = BlobsConfig {
            centers: BlobCenters::Explicit(vec![vec![0.0, 0.0], vec![10.0, 10.0]]),
            ..BlobsConfig::new(4, 2, 0.0, 1e-6, 3)
        };
        let d = make_blobs(&cfg).unwrap();
        assert_eq!(d.labels, vec![0, 0, 1, 1]);
        for (j, &l) in d.labels.iter().enumerate() {
            let c = if l == 0 { 0.0 } else { 10.0 };
            assert!((d.x[(0, j)] - c).abs() < 1e-3 && (d.x[(1, j)] - c).abs() < 1e-3);
        }
    }

    #[test]
    fn balanced_sizes() {
        let l = balanced_labels(7, 3);
        assert_eq!(l, vec![0, 0, 0, 1, 1, 2, 2]);
    }

    #[test]
    fn noiseless_circles_have_exact_radii() {
        let d = make_circles(10, 0.4, 0.0, 0).unwrap();
        for (j, &l) in d.labels.iter().enumerate() {
            let r = d.x[(0, j)].hypot(d.x[(1, j)]);
            let want = if l == 0 { 1.0 } else { 0.4 };
            assert!((r - want).abs() < 1e-12);
        }
    }

    #[test]
    fn invalid_parameters() {
        assert!(make_blobs(&BlobsConfig::new(2, 3, 1.0, 1.0, 0)).is_err());
        assert!(make_blobs(&BlobsConfig::new(4, 2, 1.0, 0.0, 0)).is_err());
        assert!(make_circles(3, 0.5, 0.0, 0).is_err());
        assert!(make_circles(10, 1.0, 0.0, 0).is_err());
        assert!(make_circles(10, 0.5, -1.0, 0).is_err());
    }
}
