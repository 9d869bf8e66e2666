//! Clustering as constrained matrix factorization.
//!
//! Data matrices hold one observation per column (`X` is m x n). Hard
//! clusterings are represented by indicator matrices (see [`cluster`]), and
//! every solver reports labels plus an objective trace through
//! [`solver::RunReport`].

pub mod cli;
pub mod cluster;
pub mod datasets;
pub mod error;
pub mod io;
pub mod kernels;
pub mod kmeans;
pub mod linalg;
pub mod metrics;
pub mod nmf;
pub mod solver;
pub mod spectral;

pub use error::{Error, Result};
pub use linalg::DenseMatrix;
pub use solver::{FactorInit, RunReport, SolverConfig};
