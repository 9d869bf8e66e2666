mod common;

use common::*;
use mfclust::cluster::{build_assignment, kmeans_objective, trace_affinity};
use mfclust::datasets::{make_blobs, make_circles, BlobsConfig};
use mfclust::kernels::{kernel_matrix, KernelSpec};
use mfclust::kmeans::{kernel_kmeans, kernel_kmeans_from_labels, lloyd, lloyd_from_labels};
use mfclust::linalg::gram;
use mfclust::metrics::purity;
use mfclust::{DenseMatrix, Error, SolverConfig};
use proptest::prelude::*;

#[test]
fn four_points_on_a_line() {
    let x = DenseMatrix::from_rows(&[vec![0.0, 0.1, 10.0, 10.1]]).unwrap();
    let (best, fmin) = best_two_partition(&rows_of(&x));
    assert!((fmin - 0.01).abs() < 1e-12);
    let r = lloyd(&x, 2, &SolverConfig::default()).unwrap();
    assert!(same_partition(&r.labels, &best));
    assert!((r.objective - 0.01).abs() < 1e-12);
}

#[test]
fn k_equal_n_is_exact() {
    let x = random_matrix(&mut rng(1), 3, 6, -1.0, 1.0);
    let r = lloyd(&x, 6, &SolverConfig::default()).unwrap();
    assert!(r.objective.abs() < 1e-12);
    let mut l = r.labels.clone();
    l.sort();
    assert_eq!(l, (0..6).collect::<Vec<_>>());
}

#[test]
fn k_above_n_is_config_error() {
    let x = DenseMatrix::zeros(2, 3);
    assert!(matches!(
        lloyd(&x, 4, &SolverConfig::default()),
        Err(Error::Config(_))
    ));
    assert!(matches!(
        lloyd(&x, 0, &SolverConfig::default()),
        Err(Error::Config(_))
    ));
}

#[test]
fn lloyd_recovers_blobs() {
    let d = make_blobs(&BlobsConfig::new(300, 3, 5.0, 0.3, 11)).unwrap();
    let r = lloyd(&d.x, 3, &SolverConfig::default().with_seed(11)).unwrap();
    assert!(purity(&r.labels, &d.labels).unwrap() >= 0.99);
    assert_eq!(r.restarts_used, 10);
    assert_eq!(*r.objective_trace.last().unwrap(), r.objective);
    let b = build_assignment(&r.labels, 3).unwrap();
    assert!(rel_err(kmeans_objective(&d.x, &b).unwrap(), r.objective) < 1e-12);
}

#[test]
fn kernel_kmeans_block_affinity() {
    let n = 6;
    let k = DenseMatrix::from_fn(n, n, |i, j| if (i < 3) == (j < 3) { 1.0 } else { 0.0 });
    let r = kernel_kmeans(&k, 2, &SolverConfig::default()).unwrap();
    assert!(same_partition(&r.labels, &[0, 0, 0, 1, 1, 1]));
    assert!((r.objective - n as f64).abs() < 1e-12);
}

#[test]
fn kernel_kmeans_rejects_bad_kernels() {
    let cfg = SolverConfig::default();
    let asym = DenseMatrix::from_rows(&[vec![1.0, 0.5], vec![0.0, 1.0]]).unwrap();
    assert!(matches!(
        kernel_kmeans(&asym, 1, &cfg),
        Err(Error::Affinity(_))
    ));
    assert!(matches!(
        kernel_kmeans(&DenseMatrix::zeros(2, 3), 1, &cfg),
        Err(Error::NotSquare { .. })
    ));
}

#[test]
fn circles_need_a_kernel() {
    let d = make_circles(200, 0.4, 0.02, 3).unwrap();
    let cfg = SolverConfig::default().with_seed(3);
    let raw = lloyd(&d.x, 2, &cfg).unwrap();
    assert!(purity(&raw.labels, &d.labels).unwrap() <= 0.7);
    let k = kernel_matrix(&d.x, &KernelSpec::rbf(10.0)).unwrap();
    let r = kernel_kmeans(&k, 2, &cfg).unwrap();
    assert!(purity(&r.labels, &d.labels).unwrap() >= 0.9);
}

#[test]
fn kernel_kmeans_dominates_random_labelings() {
    let d = make_blobs(&BlobsConfig::new(60, 3, 3.0, 0.8, 4)).unwrap();
    let k = kernel_matrix(&d.x, &KernelSpec::rbf(0.3)).unwrap();
    let r = kernel_kmeans(&k, 3, &SolverConfig::default()).unwrap();
    let got = trace_affinity(&k, &build_assignment(&r.labels, 3).unwrap()).unwrap();
    assert!((got - r.objective).abs() <= 1e-9 * got);
    let mut g = rng(4);
    for _ in 0..100 {
        let b = build_assignment(&random_labels(&mut g, 60, 3), 3).unwrap();
        assert!(trace_affinity(&k, &b).unwrap() <= got + 1e-9);
    }
}

#[test]
fn linear_kernel_kmeans_tracks_lloyd() {
    let mut g = rng(20);
    for _ in 0..20 {
        let x = random_matrix(&mut g, 3, 40, -1.0, 1.0);
        let labels = random_labels(&mut g, 40, 3);
        let cfg = SolverConfig::default();
        let a = lloyd_from_labels(&x, &labels, 3, &cfg).unwrap();
        let b = kernel_kmeans_from_labels(&gram(&x), &labels, 3, &cfg).unwrap();
        assert_eq!(a.labels, b.labels);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn lloyd_trace_never_rises(n in 4usize..60, k in 1usize..5, seed in any::<u64>()) {
        let k = k.min(n);
        let x = random_matrix(&mut rng(seed), 2, n, -3.0, 3.0);
        let r = lloyd(&x, k, &SolverConfig::default().with_seed(seed).with_restarts(2)).unwrap();
        prop_assert!(r.objective_trace.windows(2).all(|w| w[1] <= w[0]));
        prop_assert_eq!(*r.objective_trace.last().unwrap(), r.objective);
        // labels form a valid assignment
        prop_assert!(build_assignment(&r.labels, k).is_ok());
    }

    #[test]
    fn kernel_labels_are_valid(n in 4usize..40, k in 1usize..5, seed in any::<u64>()) {
        let k = k.min(n);
        let x = random_matrix(&mut rng(seed), 2, n, -3.0, 3.0);
        let km = kernel_matrix(&x, &KernelSpec::rbf(0.5)).unwrap();
        let r = kernel_kmeans(&km, k, &SolverConfig::default().with_seed(seed).with_restarts(2)).unwrap();
        prop_assert!(build_assignment(&r.labels, k).is_ok());
        prop_assert!(r.objective_trace.windows(2).all(|w| w[1] >= w[0] - 1e-12 * w[0].abs()));
    }
}
