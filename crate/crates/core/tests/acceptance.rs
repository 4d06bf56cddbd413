//! Acceptance checks on the default benchmark. Each test prints a single
//! `PASS`/`FAIL` line with the measured values, then asserts.
//!
//! The batch experiments are computed once and shared between tests.

mod common;

use std::path::Path;
use std::process::Command;
use std::sync::{Arc, OnceLock};
use std::thread;

use xgl::engine::{run_experiment, ExperimentConfig, ExperimentResult};
use xgl::explainer::{pam, DissimilarityMatrix};
use xgl::interface::{LabelRequest, SessionService};
use xgl::learner::{svm_fit, svm_fit_detailed, SmoSettings, SvmHyperParams};
use xgl::strategies::{cluster_choice_distribution, StrategyKind, Theta};
use xgl::synthdata::generate_synthetic;
use xgl::XglError;

use common::{best_single_swap_gain, clustered_points, dual_matrix, dual_objective, euclid, projected_gradient_dual, random_problem};

struct Batch {
    xgl: ExperimentResult,
    gl: ExperimentResult,
    al: ExperimentResult,
    random: ExperimentResult,
    passive: ExperimentResult,
    theta_one: ExperimentResult,
    theta_tenth: ExperimentResult,
    theta_zero: ExperimentResult,
}

fn batch() -> &'static Batch {
    static BATCH: OnceLock<Batch> = OnceLock::new();
    BATCH.get_or_init(|| {
        let base = ExperimentConfig::default();
        let ds = generate_synthetic(&base.synthetic_config()).unwrap();
        let run = |strategy, theta| {
            run_experiment(
                &ExperimentConfig {
                    strategy,
                    theta,
                    ..base.clone()
                },
                &ds,
            )
            .unwrap()
        };
        Batch {
            xgl: run(StrategyKind::Xgl, Theta::Argmax),
            gl: run(StrategyKind::Guided, Theta::Argmax),
            al: run(StrategyKind::ActiveUncertainty, Theta::Argmax),
            random: run(StrategyKind::Random, Theta::Argmax),
            passive: run(StrategyKind::Passive, Theta::Argmax),
            theta_one: run(StrategyKind::Xgl, Theta::Value(1.0)),
            theta_tenth: run(StrategyKind::Xgl, Theta::Value(0.1)),
            theta_zero: run(StrategyKind::Xgl, Theta::Value(0.0)),
        }
    })
}

fn report(id: &str, ok: bool, detail: String) {
    println!("{} criterion {id}: {detail}", if ok { "PASS" } else { "FAIL" });
}

#[test]
fn criterion_1_xgl_outperforms_baselines() {
    let b = batch();
    let at = |r: &ExperimentResult| r.summary.mean_f1[100];
    let (x, g, a, r) = (at(&b.xgl), at(&b.gl), at(&b.al), at(&b.random));
    let margins_ok = x - g >= 0.05 && x - a >= 0.05 && x - r >= 0.05;
    let switch_f1 = b.xgl.summary.f1_at_mean_switch().unwrap();
    let passive = b.passive.summary.mean_passive_f1;
    let switch_ok = switch_f1 >= passive - 0.02;
    report(
        "1",
        margins_ok && switch_ok,
        format!(
            "F1@100 xgl={x:.4} gl={g:.4} al={a:.4} random={r:.4} (margin >= 0.05: {margins_ok}); \
             mean switch iteration {:.1}, xgl F1 there {switch_f1:.4} vs passive {passive:.4} - 0.02 ({switch_ok})",
            b.xgl.summary.mean_switch_iteration.unwrap()
        ),
    );
    assert!(margins_ok, "XGL margin at iteration 100");
    assert!(switch_ok, "XGL F1 at switch {switch_f1:.4} below passive {passive:.4} - 0.02");
}

#[test]
fn criterion_2_theta_ordering() {
    let b = batch();
    let last = |r: &ExperimentResult| *r.summary.mean_f1.last().unwrap();
    let (one, tenth, zero) = (last(&b.theta_one), last(&b.theta_tenth), last(&b.theta_zero));
    let order_ok = one >= tenth && tenth >= zero;
    let gap_ok = one - zero >= 0.05;
    let at100 = |r: &ExperimentResult| r.summary.mean_f1[100];
    report(
        "2",
        order_ok && gap_ok,
        format!(
            "final F1 theta=1 {one:.4}, theta=0.1 {tenth:.4}, theta=0 {zero:.4} (ordered: {order_ok}, gap {:.4} >= 0.05: {gap_ok}); \
             at iteration 100: {:.4} / {:.4} / {:.4}",
            one - zero,
            at100(&b.theta_one),
            at100(&b.theta_tenth),
            at100(&b.theta_zero)
        ),
    );
    assert!(order_ok, "theta ordering");
    assert!(gap_ok, "F1(theta=1) - F1(theta=0) = {:.4} < 0.05", one - zero);
}

#[test]
fn criterion_3_red_cluster_discovery() {
    let b = batch();
    let x = b.xgl.summary.mean_discovered[140];
    let a = b.al.summary.mean_discovered[140];
    let ok = x >= 20.0 && a <= x - 5.0;
    report(
        "3",
        ok,
        format!(
            "mean red clusters found by iteration 140: xgl={x:.2} al={a:.2} gl={:.2} random={:.2}",
            b.gl.summary.mean_discovered[140], b.random.summary.mean_discovered[140]
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_4_smo_matches_oracle() {
    let params = SvmHyperParams::default();
    let mut worst_gap: f64 = 0.0;
    for seed in 0..20 {
        let ex = random_problem(12, 1000 + seed);
        let fit = svm_fit_detailed(&ex, params, &SmoSettings::default()).unwrap();
        let ours = dual_objective(&dual_matrix(&ex, params.gamma), &fit.alpha);
        let (_, oracle) = projected_gradient_dual(&ex, params.gamma, params.c, 20_000);
        worst_gap = worst_gap.max((ours - oracle).abs());
    }
    let b = batch();
    let worst_kkt = [&b.xgl, &b.gl, &b.al, &b.random, &b.passive, &b.theta_one, &b.theta_tenth, &b.theta_zero]
        .iter()
        .flat_map(|r| r.curves.iter().map(|c| c.max_kkt_residual))
        .fold(0.0, f64::max);
    let ok = worst_gap <= 1e-4 && worst_kkt <= 1e-3;
    report(
        "4",
        ok,
        format!("max |dual gap| vs projected gradient over 20 problems {worst_gap:.2e}; max KKT residual over batch fits {worst_kkt:.2e}"),
    );
    assert!(ok);
}

#[test]
fn criterion_5_pam_is_swap_optimal() {
    let mut worst = f64::NEG_INFINITY;
    for seed in 0..20u64 {
        let n = 20 + (seed as usize * 3) % 21;
        let k = 2 + seed as usize % 5;
        let points = clustered_points(n, 3, 500 + seed);
        let diss = DissimilarityMatrix::from_fn(n, |i, j| euclid(&points[i], &points[j]));
        let res = pam(&diss, k, seed).unwrap();
        worst = worst.max(best_single_swap_gain(&points, &res.medoids));
    }
    let ok = worst <= 1e-10;
    report("5", ok, format!("best single-swap improvement over 20 instances (n <= 40): {worst:.3e}"));
    assert!(ok);
}

#[test]
fn criterion_6_cluster_choice_distribution() {
    let mut ok = true;
    let cases: [&[usize]; 5] = [&[3, 1], &[0, 0, 0], &[7, 2, 9, 9, 1], &[120, 3, 47], &[1, 2, 3, 4, 5, 6, 7, 8, 9, 10]];
    for m in cases {
        for t in [0.0, 0.1, 1.0, 10.0] {
            let p = cluster_choice_distribution(m, Theta::Value(t));
            ok &= (p.iter().sum::<f64>() - 1.0).abs() <= 1e-12;
            if t == 0.0 {
                ok &= p.iter().all(|&v| v == 1.0 / m.len() as f64);
            } else {
                let top = p.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                let max_m = *m.iter().max().unwrap();
                ok &= (0..m.len()).filter(|&i| p[i] == top).all(|i| m[i] == max_m);
                ok &= (0..m.len()).filter(|&i| m[i] == max_m).all(|i| p[i] == top);
            }
        }
    }
    let p = cluster_choice_distribution(&[3, 1], Theta::Value(1.0));
    let reference = (p[0] - 0.8808).abs() <= 1e-4 && (p[1] - 0.1192).abs() <= 1e-4;
    ok &= reference;
    report("6", ok, format!("m=[3,1], theta=1 -> [{:.4}, {:.4}]", p[0], p[1]));
    assert!(ok);
}

#[test]
fn criterion_7_cli_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let run = |out: &str| {
        let status = Command::new(env!("CARGO_BIN_EXE_xgl"))
            .args(["run", "--strategy", "xgl,al,random", "--budget", "40", "--seed", "11", "--no-plots", "--out", out])
            .current_dir(dir.path())
            .output()
            .unwrap();
        assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
        std::fs::read(dir.path().join(out)).unwrap()
    };
    let a = run("a.csv");
    let b = run("b.csv");
    let ok = a == b && !a.is_empty();
    report("7", ok, format!("two runs wrote {} and {} bytes, identical: {}", a.len(), b.len(), a == b));
    assert!(ok);
    assert!(Path::new(&dir.path().join("a.csv")).exists());
}

#[test]
fn criterion_8_xgl_contract_replay() {
    let b = batch();
    let ds = generate_synthetic(&b.xgl.config.synthetic_config()).unwrap();
    let params = b.xgl.config.svm_params();
    let mut violations = 0;
    let mut checked = 0;
    let mut switched_folds = 0;
    for curve in &b.xgl.curves {
        let flips = curve.records.windows(2).filter(|w| w[0].switched != w[1].switched).count();
        if flips > 1 || curve.records[0].switched {
            violations += 1;
        }
        if curve.switch_iteration.is_some() {
            switched_folds += 1;
        }
        for t in 1..curve.records.len() {
            let rec = &curve.records[t];
            if rec.switched {
                continue;
            }
            let pairs: Vec<_> = curve.labeled_at(t - 1).iter().map(|&i| (ds.point(i), ds.label(i))).collect();
            let model = svm_fit(&pairs, params).unwrap();
            let i = rec.selected_index.unwrap();
            checked += 1;
            if model.predict(&ds.point(i)) == ds.label(i) {
                violations += 1;
            }
        }
    }
    let ok = violations == 0;
    report(
        "8",
        ok,
        format!("{checked} pre-switch selections replayed, {violations} violations; {switched_folds}/10 folds switched"),
    );
    assert!(ok);
}

#[test]
fn criterion_9_live_session_round_trip() {
    let config = ExperimentConfig::default();
    let service = Arc::new(SessionService::with_config(&config).unwrap());
    let mut view = service.state().unwrap();
    let mut refreshed = true;
    for step in 0..10 {
        let p = view.points.iter().filter(|p| !p.labeled).nth(step * 7).unwrap();
        let next = service
            .submit_label(&LabelRequest::for_index(view.model_version, p.index, p.truth))
            .unwrap();
        refreshed &= next.explanation.model_version == next.model_version && next.explanation != view.explanation;
        view = next;
    }
    let state = service.state().unwrap();
    let mut race_ok = true;
    for _ in 0..3 {
        let v = service.state().unwrap();
        let candidates: Vec<_> = v.points.iter().filter(|p| !p.labeled).take(2).cloned().collect();
        let handles: Vec<_> = candidates
            .into_iter()
            .map(|p| {
                let s = Arc::clone(&service);
                let version = v.model_version;
                thread::spawn(move || s.submit_label(&LabelRequest::for_index(version, p.index, p.truth)))
            })
            .collect();
        let results: Vec<_> = handles.into_iter().map(|h| h.join().unwrap()).collect();
        let ok = results.iter().filter(|r| r.is_ok()).count();
        let conflicts = results
            .iter()
            .filter(|r| matches!(r, Err(XglError::VersionConflict { .. })))
            .count();
        race_ok &= ok == 1 && conflicts == 1;
    }
    let ok = state.model_version == 10 && state.f1_history.len() == 11 && refreshed && race_ok;
    report(
        "9",
        ok,
        format!(
            "after 10 labels model_version={} f1_history={} explanation refreshed each step: {refreshed}; races one winner each: {race_ok}",
            state.model_version,
            state.f1_history.len()
        ),
    );
    assert!(ok);
}
