mod common;

use std::collections::HashMap;
use std::fs;

use common::*;
use mfclust::datasets::{make_blobs, make_circles, BlobCenters, BlobsConfig};
use mfclust::io::{load_labels, load_matrix, save_labels, save_matrix, save_metadata};
use mfclust::kmeans::lloyd;
use mfclust::metrics::{best_match_accuracy, nmi, purity};
use mfclust::{DenseMatrix, Error, SolverConfig};
use proptest::prelude::*;

/// NMI from a hand-built contingency table with arithmetic-mean
/// normalization.
fn nmi_oracle(a: &[usize], b: &[usize]) -> f64 {
    let n = a.len() as f64;
    let mut joint: HashMap<(usize, usize), f64> = HashMap::new();
    let mut pa: HashMap<usize, f64> = HashMap::new();
    let mut pb: HashMap<usize, f64> = HashMap::new();
    for (&x, &y) in a.iter().zip(b) {
        *joint.entry((x, y)).or_default() += 1.0 / n;
        *pa.entry(x).or_default() += 1.0 / n;
        *pb.entry(y).or_default() += 1.0 / n;
    }
    let h = |p: &HashMap<usize, f64>| -p.values().map(|v| v * v.ln()).sum::<f64>();
    let (ha, hb) = (h(&pa), h(&pb));
    if pa.len() < 2 || pb.len() < 2 {
        return 0.0;
    }
    let mi: f64 = joint
        .iter()
        .map(|(&(x, y), &p)| p * (p / (pa[&x] * pb[&y])).ln())
        .sum();
    mi / (0.5 * (ha + hb))
}

#[test]
fn blobs_with_tiny_sigma_sit_on_centres() {
    let cfg = BlobsConfig {
        centers: BlobCenters::Explicit(vec![vec![0.0, 0.0], vec![10.0, 10.0]]),
        ..BlobsConfig::new(4, 2, 0.0, 1e-6, 1)
    };
    let d = make_blobs(&cfg).unwrap();
    assert_eq!(d.x.shape(), (2, 4));
    for (j, &l) in d.labels.iter().enumerate() {
        let c = 10.0 * l as f64;
        assert!((d.x[(0, j)] - c).abs() < 1e-3 && (d.x[(1, j)] - c).abs() < 1e-3);
    }
}

#[test]
fn generators_are_deterministic() {
    let cfg = BlobsConfig::new(50, 3, 5.0, 0.3, 9);
    assert_eq!(make_blobs(&cfg).unwrap(), make_blobs(&cfg).unwrap());
    assert_ne!(
        make_blobs(&cfg).unwrap().x,
        make_blobs(&BlobsConfig { seed: 10, ..cfg }).unwrap().x
    );
    assert_eq!(
        make_circles(40, 0.4, 0.02, 9).unwrap(),
        make_circles(40, 0.4, 0.02, 9).unwrap()
    );
}

#[test]
fn blob_layouts_and_balance() {
    for centers in [
        BlobCenters::Axes {
            spread: 5.0,
            dim: 4,
        },
        BlobCenters::Circle { spread: 5.0 },
        BlobCenters::Line { spread: 5.0 },
    ] {
        let d = make_blobs(&BlobsConfig {
            centers,
            ..BlobsConfig::new(31, 3, 5.0, 0.3, 2)
        })
        .unwrap();
        let mut counts = [0usize; 3];
        for &l in &d.labels {
            counts[l] += 1;
        }
        assert!(counts.iter().max().unwrap() - counts.iter().min().unwrap() <= 1);
        assert_eq!(d.labels.len(), d.x.cols());
    }
    let bad = BlobsConfig {
        centers: BlobCenters::Axes {
            spread: 5.0,
            dim: 2,
        },
        ..BlobsConfig::new(9, 3, 5.0, 0.3, 0)
    };
    assert!(matches!(make_blobs(&bad), Err(Error::Config(_))));
}

#[test]
fn nonnegative_shift_keeps_entries_nonnegative() {
    let cfg = BlobsConfig {
        nonnegative: true,
        centers: BlobCenters::Circle { spread: 5.0 },
        ..BlobsConfig::new(60, 3, 5.0, 0.3, 3)
    };
    let d = make_blobs(&cfg).unwrap();
    assert!(d.x.min() >= 0.0);
    for i in 0..d.x.rows() {
        assert_eq!(
            d.x.row(i).iter().copied().fold(f64::INFINITY, f64::min),
            0.0
        );
    }
}

#[test]
fn blobs_are_recoverable_by_lloyd() {
    let d = make_blobs(&BlobsConfig::new(300, 3, 5.0, 0.3, 4)).unwrap();
    let r = lloyd(&d.x, 3, &SolverConfig::default().with_seed(4)).unwrap();
    assert!(purity(&r.labels, &d.labels).unwrap() >= 0.99);
}

#[test]
fn noiseless_circle_radii() {
    let d = make_circles(30, 0.4, 0.0, 5).unwrap();
    for (j, &l) in d.labels.iter().enumerate() {
        let r = d.x[(0, j)].hypot(d.x[(1, j)]);
        let want = if l == 0 { 1.0 } else { 0.4 };
        assert!((r - want).abs() <= 1e-12);
    }
}

#[test]
fn circle_parameter_errors() {
    assert!(matches!(
        make_circles(3, 0.5, 0.0, 0),
        Err(Error::Config(_))
    ));
    let e = make_circles(10, 1.5, 0.0, 0).unwrap_err();
    assert!(e.to_string().contains("radius_ratio must be in (0,1)"));
    assert!(make_circles(10, 0.5, -0.1, 0).is_err());
}

#[test]
fn purity_examples() {
    let truth = [0, 0, 1, 1, 2, 2];
    assert_eq!(purity(&truth, &truth).unwrap(), 1.0);
    assert_eq!(purity(&[2, 2, 0, 0, 1, 1], &truth).unwrap(), 1.0);
    assert_eq!(purity(&[0, 1, 0, 1], &[0, 0, 1, 1]).unwrap(), 0.5);
    assert!(purity(&[0, 1], &[0]).is_err());
    assert!(purity(&[], &[]).is_err());
}

#[test]
fn nmi_examples() {
    let truth = [0, 0, 1, 1];
    assert!((nmi(&truth, &truth).unwrap() - 1.0).abs() < 1e-12);
    assert_eq!(nmi(&[0, 0, 0, 0], &truth).unwrap(), 0.0);
    assert!(nmi(&[0, 1, 0, 1], &truth).unwrap().abs() < 1e-12);
    assert!(nmi_oracle(&[0, 1, 0, 1], &truth).abs() < 1e-12);
    assert!(nmi(&[0, 1, 0], &truth).is_err());
}

#[test]
fn best_match_examples() {
    assert_eq!(
        best_match_accuracy(&[1, 1, 0, 0], &[0, 0, 1, 1]).unwrap(),
        1.0
    );
    assert_eq!(
        best_match_accuracy(&[0, 0, 0, 1], &[0, 0, 1, 1]).unwrap(),
        0.75
    );
}

#[test]
fn matrix_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("x.csv");
    let x = random_matrix(&mut rng(6), 5, 7, -1e3, 1e3);
    save_matrix(&x, &path).unwrap();
    let y = load_matrix(&path, false).unwrap();
    assert!(max_abs_diff(&x, &y) <= 1e-15 * x.max_abs());
    assert_eq!(load_matrix(&path, true).unwrap(), y.transpose());
}

#[test]
fn matrix_load_errors() {
    let dir = tempfile::tempdir().unwrap();
    let write = |name: &str, text: &str| {
        let p = dir.path().join(name);
        fs::write(&p, text).unwrap();
        p
    };
    assert!(matches!(
        load_matrix(write("empty.csv", ""), false),
        Err(Error::Format { .. })
    ));
    match load_matrix(write("ragged.csv", "1,2,3\n4,5\n"), false) {
        Err(Error::Format { msg, .. }) => assert!(msg.contains("row 2"), "{msg}"),
        other => panic!("{other:?}"),
    }
    match load_matrix(write("bad.csv", "1,2\n3,x\n"), false) {
        Err(Error::Parse { row, col, .. }) => assert_eq!((row, col), (2, 2)),
        other => panic!("{other:?}"),
    }
    assert!(load_matrix(write("nan.csv", "1,NaN\n"), false).is_err());
    let header = load_matrix(write("header.csv", "a,b\n1,2\n"), false).unwrap();
    assert_eq!(header, DenseMatrix::from_rows(&[vec![1.0, 2.0]]).unwrap());
    assert!(matches!(
        load_matrix(dir.path().join("missing.csv"), false),
        Err(Error::Io { .. })
    ));
}

#[test]
fn labels_and_metadata_files() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("labels.csv");
    save_labels(&[2, 0, 1], &p).unwrap();
    assert_eq!(load_labels(&p).unwrap(), vec![2, 0, 1]);
    fs::write(&p, "label\n1\n0\n").unwrap();
    assert_eq!(load_labels(&p).unwrap(), vec![1, 0]);
    fs::write(&p, "0,1,1\n").unwrap();
    assert_eq!(load_labels(&p).unwrap(), vec![0, 1, 1]);
    fs::write(&p, "0\n-1\n").unwrap();
    assert!(matches!(load_labels(&p), Err(Error::Parse { row: 2, .. })));

    let d = make_circles(8, 0.3, 0.0, 4).unwrap();
    let m = dir.path().join("meta.txt");
    save_metadata(&d.meta, &m).unwrap();
    let text = fs::read_to_string(&m).unwrap();
    assert!(text.starts_with("generator=circles\nseed=4\n"));
    assert!(text.contains("radius_ratio=0.3"));
}

fn labelings() -> impl Strategy<Value = (Vec<usize>, Vec<usize>, Vec<usize>)> {
    (2usize..60, 1usize..5, 1usize..5).prop_flat_map(|(n, ka, kb)| {
        (
            prop::collection::vec(0..ka, n),
            prop::collection::vec(0..kb, n),
            Just((0..ka.max(kb)).collect::<Vec<usize>>()).prop_shuffle(),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn metrics_ignore_relabeling((a, b, perm) in labelings()) {
        let pa: Vec<usize> = a.iter().map(|&l| perm[l]).collect();
        let pb: Vec<usize> = b.iter().map(|&l| perm[l]).collect();
        let p = purity(&a, &b).unwrap();
        prop_assert_eq!(p, purity(&pa, &b).unwrap());
        prop_assert_eq!(p, purity(&a, &pb).unwrap());
        let v = nmi(&a, &b).unwrap();
        prop_assert!((v - nmi(&pa, &b).unwrap()).abs() <= 1e-12);
        prop_assert!((v - nmi(&a, &pb).unwrap()).abs() <= 1e-12);
        prop_assert!((v - nmi_oracle(&a, &b).clamp(0.0, 1.0)).abs() <= 1e-12);
        prop_assert!((0.0..=1.0).contains(&p) && (0.0..=1.0).contains(&v));
    }

    #[test]
    fn self_agreement((a, _b, _p) in labelings()) {
        prop_assert_eq!(purity(&a, &a).unwrap(), 1.0);
        let distinct = a.iter().collect::<std::collections::HashSet<_>>().len();
        if distinct >= 2 {
            prop_assert!((nmi(&a, &a).unwrap() - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn file_round_trip(m in 1usize..6, n in 1usize..9, seed in any::<u64>()) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.csv");
        let x = random_matrix(&mut rng(seed), m, n, -1e6, 1e6);
        save_matrix(&x, &path).unwrap();
        let y = load_matrix(&path, false).unwrap();
        for (a, b) in x.as_slice().iter().zip(y.as_slice()) {
            prop_assert!((a - b).abs() <= 1e-15 * a.abs().max(1.0));
        }
    }

    #[test]
    fn generators_are_pure(n in 4usize..80, k in 1usize..4, seed in any::<u64>()) {
        let k = k.min(n);
        let cfg = BlobsConfig::new(n, k, 3.0, 0.5, seed);
        prop_assert_eq!(make_blobs(&cfg).unwrap(), make_blobs(&cfg).unwrap());
        prop_assert_eq!(make_circles(n, 0.5, 0.1, seed).unwrap(), make_circles(n, 0.5, 0.1, seed).unwrap());
    }
}
