mod common;

use std::collections::BTreeSet;

use xgl::explainer::{build_explanation, pam, surrogate_fidelity, DissimilarityMatrix};
use xgl::learner::{svm_fit, SvmHyperParams};
use xgl::synthdata::{generate_synthetic, stratified_kfold, SyntheticConfig};
use xgl::XglError;

use common::{best_single_swap_gain, clustered_points, euclid, medoid_cost};

fn matrix(points: &[Vec<f64>]) -> DissimilarityMatrix {
    DissimilarityMatrix::from_fn(points.len(), |i, j| euclid(&points[i], &points[j]))
}

#[test]
fn pam_result_is_swap_optimal() {
    for seed in 0..15 {
        let n = 15 + (seed as usize * 7) % 26;
        let points = clustered_points(n, 3, seed);
        for k in [2, 3, 5] {
            let res = pam(&matrix(&points), k, seed).unwrap();
            let gain = best_single_swap_gain(&points, &res.medoids);
            assert!(gain <= 1e-10, "seed {seed} k {k}: swap improves by {gain}");
            assert!((res.cost - medoid_cost(&points, &res.medoids)).abs() < 1e-9);
        }
    }
}

#[test]
fn pam_one_median_is_exact() {
    let points = clustered_points(30, 2, 9);
    let res = pam(&matrix(&points), 1, 0).unwrap();
    let best = (0..points.len())
        .map(|m| medoid_cost(&points, &[m]))
        .fold(f64::INFINITY, f64::min);
    assert!((res.cost - best).abs() < 1e-12);
}

#[test]
fn pam_assignment_is_nearest_medoid() {
    let points = clustered_points(40, 2, 3);
    let res = pam(&matrix(&points), 4, 1).unwrap();
    for (o, &c) in res.assignment.iter().enumerate() {
        let d = euclid(&points[o], &points[res.medoids[c]]);
        let nearest = res
            .medoids
            .iter()
            .map(|&m| euclid(&points[o], &points[m]))
            .fold(f64::INFINITY, f64::min);
        assert_eq!(d, nearest);
    }
    assert!(res.cost_trace.windows(2).all(|w| w[1] <= w[0]));
    assert_eq!(res, pam(&matrix(&points), 4, 1).unwrap());
}

#[test]
fn too_many_clusters_is_an_error() {
    let points = clustered_points(5, 2, 0);
    assert!(matches!(pam(&matrix(&points), 6, 0), Err(XglError::TooManyClusters { .. })));
}

#[test]
fn explanation_on_synthetic_pool() {
    let ds = generate_synthetic(&SyntheticConfig {
        n_blue: 300,
        n_red: 50,
        seed: 2,
        ..SyntheticConfig::default()
    })
    .unwrap();
    let folds = stratified_kfold(&ds, 5, 2).unwrap();
    let pool = &folds[0].train_indices;
    let labeled: BTreeSet<usize> = pool.iter().copied().step_by(7).collect();
    let pairs: Vec<_> = labeled.iter().map(|&i| (ds.point(i), ds.label(i))).collect();
    let model = svm_fit(&pairs, SvmHyperParams::default()).unwrap();
    let expl = build_explanation(&ds, pool, &labeled, &model, 10, 0.5, 11, 3).unwrap();

    assert_eq!(expl.clusters.len(), 10);
    assert_eq!(expl.model_version, 3);
    let mut all: Vec<usize> = expl.clusters.iter().flat_map(|c| c.member_indices.clone()).collect();
    all.sort_unstable();
    assert_eq!(&all, pool);
    for c in &expl.clusters {
        assert!(c.member_indices.contains(&c.medoid_index));
        assert!(c.member_indices.iter().all(|&i| c.bounds.contains(&ds.point(i))));
        let red = c
            .member_indices
            .iter()
            .filter(|&&i| {
                let l = if labeled.contains(&i) { ds.label(i) } else { model.predict(&ds.point(i)) };
                l.is_red()
            })
            .count();
        assert_eq!(c.majority_label.is_red(), 2 * red >= c.member_count());
        assert!(c.description.ends_with(&format!("predicted {}", c.majority_label)));
    }
    let fid = surrogate_fidelity(&expl, &model, 3, &ds).unwrap();
    assert!((0.0..=1.0).contains(&fid));
    assert!(matches!(
        surrogate_fidelity(&expl, &model, 4, &ds),
        Err(XglError::StaleExplanation { .. })
    ));
}

/// Agreement with the model when each part is summarized by its majority
/// prediction (ties red), computed from scratch.
fn partition_fidelity(parts: &[Vec<usize>], pred_red: &dyn Fn(usize) -> bool) -> f64 {
    let total: usize = parts.iter().map(Vec::len).sum();
    let agree: usize = parts
        .iter()
        .map(|p| {
            let red = p.iter().filter(|&&i| pred_red(i)).count();
            red.max(p.len() - red)
        })
        .sum();
    agree as f64 / total as f64
}

#[test]
fn explanation_beats_random_partitions() {
    use rand::seq::SliceRandom;
    use rand::SeedableRng;

    let ds = generate_synthetic(&SyntheticConfig::default()).unwrap();
    let folds = stratified_kfold(&ds, 10, 0).unwrap();
    let pool = &folds[0].train_indices;
    let labeled: BTreeSet<usize> = pool.iter().copied().step_by(5).collect();
    let pairs: Vec<_> = labeled.iter().map(|&i| (ds.point(i), ds.label(i))).collect();
    let model = svm_fit(&pairs, SvmHyperParams::default()).unwrap();
    let expl = build_explanation(&ds, pool, &labeled, &model, 10, 0.5, 0, 0).unwrap();
    let ours = surrogate_fidelity(&expl, &model, 0, &ds).unwrap();

    let pred_red = |i: usize| model.predict(&ds.point(i)).is_red();
    let sizes: Vec<usize> = expl.clusters.iter().map(|c| c.member_count()).collect();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
    let mut shuffled = pool.clone();
    for _ in 0..100 {
        shuffled.shuffle(&mut rng);
        let mut parts = Vec::new();
        let mut start = 0;
        for &s in &sizes {
            parts.push(shuffled[start..start + s].to_vec());
            start += s;
        }
        assert!(ours >= partition_fidelity(&parts, &pred_red));
    }
}
