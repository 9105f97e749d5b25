//! Invariants of the skeleton construction, weights, segmentation and I/O.

mod common;

use common::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use skeleton_clust::bench::adjusted_rand_index;
use skeleton_clust::io::{read_numeric_csv, write_matrix_csv, TruthColumn};
use skeleton_clust::knots::{kmeans_fit, KMeansAlgorithm, KnotCount};
use skeleton_clust::pipeline::segment_knots;
use skeleton_clust::segmentation::{cut_dendrogram, hierarchical_cluster, CondensedDistances};
use skeleton_clust::skeleton::approx_delaunay;
use skeleton_clust::weights::{weight_skeleton, TubeRadius, WeightParams};
use skeleton_clust::{DataMatrix, KMeansConfig, KnotSet, Linkage, Seed, WeightKind};

fn matrix(n: usize, d: usize) -> impl Strategy<Value = DataMatrix> {
    prop::collection::vec(-10.0f64..10.0, n * d).prop_map(move |v| DataMatrix::new(n, d, v).unwrap())
}

fn labels(n: usize, k: usize) -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(0..k, n)
}

/// Data with `k` distinct leading rows used as centers.
fn with_centers(data: &DataMatrix, k: usize) -> Option<DataMatrix> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for x in data.iter_rows() {
        if rows.len() == k {
            break;
        }
        if !rows.iter().any(|r| r.as_slice() == x) {
            rows.push(x.to_vec());
        }
    }
    (rows.len() == k).then(|| DataMatrix::from_rows(&rows).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn witness_evidence_counts_every_observation(data in matrix(80, 3), k in 2usize..10) {
        let centers = with_centers(&data, k).unwrap();
        let knots = KnotSet::from_centers(&data, centers).unwrap();
        let edges = approx_delaunay(&knots);
        prop_assert_eq!(edges.evidence.iter().sum::<usize>(), 80);
        prop_assert!(edges.pairs.windows(2).all(|w| w[0] < w[1]));
        prop_assert!(edges.pairs.iter().all(|&(a, b)| a < b && b < k));
    }

    #[test]
    fn voronoi_masses_sum_to_one(data in matrix(60, 2), k in 2usize..8) {
        let centers = with_centers(&data, k).unwrap();
        let knots = KnotSet::from_centers(&data, centers).unwrap();
        let edges = approx_delaunay(&knots);
        let g = weight_skeleton(&edges, &data, &knots, WeightKind::Voronoi, &WeightParams::default()).unwrap();
        let mass: f64 = edges
            .pairs
            .iter()
            .zip(&g.weights)
            .map(|(&(a, b), w)| w * naive_sq_dist(knots.center(a), knots.center(b)).sqrt())
            .sum();
        prop_assert!((mass - 1.0).abs() < 1e-12);
    }

    #[test]
    fn weights_are_finite_and_nonnegative(data in matrix(60, 3), k in 2usize..7, kind_ix in 0usize..4) {
        let kind = [WeightKind::Voronoi, WeightKind::Face, WeightKind::Tube, WeightKind::AvgDist][kind_ix];
        let centers = with_centers(&data, k).unwrap();
        let knots = KnotSet::from_centers(&data, centers).unwrap();
        let edges = approx_delaunay(&knots);
        let g = weight_skeleton(&edges, &data, &knots, kind, &WeightParams::default()).unwrap();
        prop_assert_eq!(g.weights.len(), edges.len());
        for (w, warn) in g.weights.iter().zip(&g.warnings) {
            prop_assert!(w.is_finite() && *w >= 0.0);
            if warn.is_some() {
                prop_assert_eq!(*w, 0.0);
            }
        }
    }

    #[test]
    fn dendrogram_heights_never_decrease(
        values in prop::collection::vec(0.01f64..100.0, 45),
        linkage_ix in 0usize..3,
    ) {
        let linkage = Linkage::ALL[linkage_ix];
        let dist = CondensedDistances::new(10, values).unwrap();
        let dendro = hierarchical_cluster(&dist, linkage).unwrap();
        prop_assert_eq!(dendro.merges.len(), 9);
        prop_assert!(dendro.heights().windows(2).all(|w| w[0] <= w[1]));
        prop_assert_eq!(dendro.merges.last().unwrap().size, 10);
    }

    #[test]
    fn cut_yields_requested_group_count(
        values in prop::collection::vec(0.01f64..100.0, 45),
        s in 1usize..=10,
    ) {
        let dist = CondensedDistances::new(10, values).unwrap();
        let dendro = hierarchical_cluster(&dist, Linkage::Average).unwrap();
        let groups = cut_dendrogram(&dendro, s).unwrap();
        let distinct = groups.iter().max().unwrap() + 1;
        prop_assert_eq!(distinct, s);
        // Groups are numbered in order of first appearance.
        let mut seen = 0;
        for &g in &groups {
            prop_assert!(g <= seen);
            if g == seen {
                seen += 1;
            }
        }
    }

    #[test]
    fn ari_is_symmetric_bounded_and_label_invariant(a in labels(40, 4), b in labels(40, 5)) {
        let ab = adjusted_rand_index(&a, &b).unwrap();
        let ba = adjusted_rand_index(&b, &a).unwrap();
        prop_assert!((ab - ba).abs() < 1e-12);
        prop_assert!((-1.0 - 1e-12..=1.0 + 1e-12).contains(&ab));
        let permuted: Vec<usize> = a.iter().map(|&x| (x * 7 + 3) % 11).collect();
        prop_assert!((adjusted_rand_index(&permuted, &b).unwrap() - ab).abs() < 1e-12);
        prop_assert_eq!(adjusted_rand_index(&a, &a).unwrap(), 1.0);
    }

    #[test]
    fn every_observation_gets_one_of_s_labels(data in matrix(90, 2), s in 1usize..6, link_ix in 0usize..3) {
        let centers = with_centers(&data, 8).unwrap();
        let knots = KnotSet::from_centers(&data, centers).unwrap();
        let run = segment_knots(&data, knots, WeightKind::Voronoi, &WeightParams::default(), Linkage::ALL[link_ix], s)
            .unwrap();
        prop_assert_eq!(run.result.labels.len(), 90);
        prop_assert_eq!(run.result.n_clusters, s);
        for (i, &lab) in run.result.labels.iter().enumerate() {
            prop_assert_eq!(lab, run.result.knot_groups[run.skeleton.knots.assign1[i]]);
        }
    }

    #[test]
    fn csv_round_trip_is_exact(data in matrix(12, 4), truth in labels(12, 3)) {
        let mut buf = Vec::new();
        write_matrix_csv(&data, Some(&truth), &mut buf).unwrap();
        let table = read_numeric_csv(buf.as_slice()).unwrap();
        let (back, t) = table.into_features(TruthColumn::Auto).unwrap();
        prop_assert_eq!(back, data);
        let t = t.unwrap();
        // Labels come back densely renumbered, so compare as partitions.
        prop_assert_eq!(adjusted_rand_index(&t, &truth).unwrap(), 1.0);
    }

    #[test]
    fn kmeans_is_reproducible_and_cells_nonempty(data in matrix(50, 2), seed in any::<u64>(), k in 2usize..8) {
        prop_assume!(with_centers(&data, k).is_some());
        let cfg = KMeansConfig {
            k: KnotCount::Fixed(k),
            restarts: 3,
            seed: Seed(seed),
            ..KMeansConfig::default()
        };
        let a = kmeans_fit(&data, &cfg).unwrap();
        let b = kmeans_fit(&data, &cfg).unwrap();
        prop_assert_eq!(&a.knots, &b.knots);
        prop_assert!(a.knots.sizes.iter().all(|&s| s > 0));
        prop_assert_eq!(a.knots.sizes.iter().sum::<usize>(), 50);
    }

    #[test]
    fn hartigan_objective_never_exceeds_lloyd(data in matrix(60, 2), seed in any::<u64>()) {
        prop_assume!(with_centers(&data, 6).is_some());
        let cfg = |algorithm| KMeansConfig {
            k: KnotCount::Fixed(6),
            algorithm,
            restarts: 1,
            seed: Seed(seed),
            ..KMeansConfig::default()
        };
        let lloyd = kmeans_fit(&data, &cfg(KMeansAlgorithm::Lloyd)).unwrap();
        let hart = kmeans_fit(&data, &cfg(KMeansAlgorithm::Hartigan)).unwrap();
        prop_assert!(hart.objective <= lloyd.objective * (1.0 + 1e-12));
    }
}

#[test]
fn approximate_skeleton_is_a_subgraph_of_the_exact_delaunay_triangulation() {
    let mut r = ChaCha8Rng::seed_from_u64(21);
    for case in 0..30 {
        let knots: Vec<[f64; 2]> = (0..8).map(|_| [r.random::<f64>(), r.random::<f64>()]).collect();
        let centers = DataMatrix::from_rows(&knots).unwrap();
        let data = uniform_matrix(&mut r, 2000, 2);
        let ks = KnotSet::from_centers(&data, centers).unwrap();
        let approx = approx_delaunay(&ks);
        let exact = exact_delaunay_edges(&knots);
        for e in &approx.pairs {
            assert!(exact.contains(e), "case {case}: edge {e:?} not in {exact:?}");
        }
    }
}

fn density_weights(data: &DataMatrix, centers: &DataMatrix, kind: WeightKind, radius: TubeRadius) -> Vec<f64> {
    let knots = KnotSet::from_centers(data, centers.clone()).unwrap();
    let edges = approx_delaunay(&knots);
    let mut p = WeightParams::default();
    p.tube.radius = radius;
    weight_skeleton(&edges, data, &knots, kind, &p).unwrap().weights
}

fn random_instance(r: &mut ChaCha8Rng, d: usize) -> (DataMatrix, DataMatrix) {
    let data = uniform_matrix(r, 300, d);
    let centers = data.select_rows(&(0..8).collect::<Vec<_>>()).unwrap();
    (data, centers)
}

fn assert_close(a: &[f64], b: &[f64], what: &str) {
    assert_eq!(a.len(), b.len(), "{what}");
    for (x, y) in a.iter().zip(b) {
        assert!(relative_diff(*x, *y) <= 1e-9, "{what}: {x} vs {y}");
    }
}

#[test]
fn density_weights_are_rotation_invariant() {
    let mut r = ChaCha8Rng::seed_from_u64(22);
    for case in 0..30 {
        let d = [2, 3, 5][case % 3];
        let (data, centers) = random_instance(&mut r, d);
        let q = random_orthogonal(&mut r, d);
        let (rd, rc) = (rotate(&data, &q), rotate(&centers, &q));
        for kind in [WeightKind::Face, WeightKind::Tube] {
            let before = density_weights(&data, &centers, kind, TubeRadius::Auto);
            let after = density_weights(&rd, &rc, kind, TubeRadius::Auto);
            assert_close(&before, &after, &format!("case {case} {kind}"));
        }
    }
}

#[test]
fn density_weights_ignore_constant_extra_dimensions() {
    let mut r = ChaCha8Rng::seed_from_u64(23);
    for case in 0..30 {
        let (data, centers) = random_instance(&mut r, 2 + case % 3);
        let (pd, pc) = (data.pad_zero_columns(50), centers.pad_zero_columns(50));
        for kind in [WeightKind::Face, WeightKind::Tube] {
            let before = density_weights(&data, &centers, kind, TubeRadius::Auto);
            let after = density_weights(&pd, &pc, kind, TubeRadius::Auto);
            assert_close(&before, &after, &format!("case {case} {kind}"));
        }
    }
}
