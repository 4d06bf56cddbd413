//! Cross-validated interactive-learning experiments.
//!
//! [`run_fold`] plays one strategy on one fold: it starts from the seeded
//! five-example training set, then repeatedly selects an instance, moves it
//! from the unlabeled pool to the labeled set, refits the SVM (and, for XGL,
//! rebuilds the global explanation) and scores the model on the held-out fold.

mod config;
pub mod output;
pub mod svg;

use std::collections::BTreeSet;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use config::ExperimentConfig;

use crate::derive_seed;
use crate::error::{Result, XglError};
use crate::explainer::{build_explanation, GlobalExplanation};
use crate::learner::{f1_score, kkt_residual, svm_fit_detailed, SmoSettings, SvmHyperParams, SvmModel};
use crate::strategies::{
    guided_query, random_query, uncertainty_query, xgl_simulated_query, QueryOutcome, SimulatedUser,
    StrategyKind, Theta,
};
use crate::synthdata::{initial_training_set, stratified_kfold, Dataset, FoldSplit, Label, Point2};

const INITIAL_SET_STREAM: u64 = 0x1000;
const QUERY_STREAM: u64 = 0x2000;
const EXPLANATION_STREAM: u64 = 0x3000;

/// Seed of the initial training set of `fold`. Shared by every strategy so
/// that curves of one fold start from the same model.
pub fn initial_set_seed(seed: u64, fold_id: usize) -> u64 {
    derive_seed(seed, INITIAL_SET_STREAM + fold_id as u64)
}

fn query_seed(seed: u64, fold_id: usize) -> u64 {
    derive_seed(seed, QUERY_STREAM + fold_id as u64)
}

/// Seed for the explanation describing model version `version` of `fold`.
pub fn explanation_seed(seed: u64, fold_id: usize, version: u64) -> u64 {
    derive_seed(seed, EXPLANATION_STREAM + fold_id as u64) ^ version
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    pub f1: f64,
    pub selected_index: Option<usize>,
    pub chosen_cluster: Option<usize>,
    pub switched: bool,
    pub discovered_red_clusters: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LearningCurve {
    pub fold_id: usize,
    pub strategy: StrategyKind,
    pub theta: Theta,
    /// Iteration 0 is the initial model; one record per query after that.
    pub records: Vec<IterationRecord>,
    /// F1 of the model trained on the whole training split of this fold.
    pub passive_f1: f64,
    /// First iteration whose query was a random fallback (XGL only).
    pub switch_iteration: Option<usize>,
    /// Set when the unlabeled pool ran out before the budget.
    pub truncated: bool,
    pub initial_labeled: Vec<usize>,
    /// Worst KKT residual over every model fitted in this run.
    pub max_kkt_residual: f64,
}

impl LearningCurve {
    pub fn f1_series(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.f1).collect()
    }

    /// Labeled set after `iteration` queries.
    pub fn labeled_at(&self, iteration: usize) -> Vec<usize> {
        let mut labeled = self.initial_labeled.clone();
        labeled.extend(
            self.records
                .iter()
                .skip(1)
                .take(iteration)
                .filter_map(|r| r.selected_index),
        );
        labeled
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceRaster {
    pub resolution: usize,
    /// Row-major decision values; row `r` is `x2 = r/(R-1)`, column `c` is
    /// `x1 = c/(R-1)`.
    pub values: Vec<f64>,
    pub model_version: u64,
}

impl SurfaceRaster {
    pub fn coordinate(&self, cell: usize) -> f64 {
        cell as f64 / (self.resolution - 1) as f64
    }

    pub fn value(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.resolution + col]
    }
}

pub fn rasterize_surface(model: &SvmModel, resolution: usize, model_version: u64) -> Result<SurfaceRaster> {
    if resolution < 2 {
        return Err(XglError::InvalidConfig(format!("raster resolution must be >= 2, got {resolution}")));
    }
    let step = 1.0 / (resolution - 1) as f64;
    let values = (0..resolution)
        .flat_map(|row| (0..resolution).map(move |col| Point2::new(col as f64 * step, row as f64 * step)))
        .map(|p| model.decision_value(&p))
        .collect();
    Ok(SurfaceRaster {
        resolution,
        values,
        model_version,
    })
}

/// Number of generating grid cells with at least one red point among `queried`.
pub fn discovered_red_clusters(queried: &[usize], dataset: &Dataset) -> Result<usize> {
    let meta = dataset.generator().ok_or(XglError::MissingMetadata)?;
    let found: BTreeSet<usize> = queried
        .iter()
        .filter_map(|&i| meta.source_cluster.get(i).copied().flatten())
        .collect();
    Ok(found.len())
}

fn training_pairs(indices: impl IntoIterator<Item = usize>, dataset: &Dataset) -> Vec<(Point2, Label)> {
    indices
        .into_iter()
        .map(|i| (dataset.point(i), dataset.label(i)))
        .collect()
}

struct Fitted {
    model: SvmModel,
    kkt: f64,
}

fn fit(indices: &BTreeSet<usize>, dataset: &Dataset, params: SvmHyperParams) -> Result<Fitted> {
    let pairs = training_pairs(indices.iter().copied(), dataset);
    let outcome = svm_fit_detailed(&pairs, params, &SmoSettings::default())?;
    let kkt = kkt_residual(&outcome.model, &pairs, &outcome.alpha);
    Ok(Fitted {
        model: outcome.model,
        kkt,
    })
}

fn test_f1(model: &SvmModel, test: &[usize], dataset: &Dataset) -> Result<f64> {
    let preds: Vec<Label> = test.iter().map(|&i| model.predict(&dataset.point(i))).collect();
    let truth: Vec<Label> = test.iter().map(|&i| dataset.label(i)).collect();
    f1_score(&preds, &truth)
}

/// Fits on the whole training split and scores on the test fold.
pub fn passive_f1(config: &ExperimentConfig, fold: &FoldSplit, dataset: &Dataset) -> Result<(f64, f64)> {
    let all: BTreeSet<usize> = fold.train_indices.iter().copied().collect();
    let fitted = fit(&all, dataset, config.svm_params())?;
    Ok((test_f1(&fitted.model, &fold.test_indices, dataset)?, fitted.kkt))
}

/// Builds the explanation that the engine shows for model version `version`
/// of `fold`.
pub fn explanation_for(
    config: &ExperimentConfig,
    fold: &FoldSplit,
    dataset: &Dataset,
    labeled: &BTreeSet<usize>,
    model: &SvmModel,
    version: u64,
) -> Result<GlobalExplanation> {
    build_explanation(
        dataset,
        &fold.train_indices,
        labeled,
        model,
        config.k_clusters,
        config.w,
        explanation_seed(config.seed, fold.fold_id, version),
        version,
    )
}

pub fn run_fold(config: &ExperimentConfig, fold: &FoldSplit, dataset: &Dataset) -> Result<LearningCurve> {
    config.validate()?;
    if config.strategy == StrategyKind::XglHuman {
        return Err(XglError::InvalidConfig(
            "xgl_human needs a live supervisor; use the session service".into(),
        ));
    }
    let params = config.svm_params();
    let (passive, passive_kkt) = passive_f1(config, fold, dataset)?;
    let initial = initial_training_set(fold, dataset, initial_set_seed(config.seed, fold.fold_id))?;

    if config.strategy == StrategyKind::Passive {
        let discovered = discovered_red_clusters(&fold.train_indices, dataset)?;
        return Ok(LearningCurve {
            fold_id: fold.fold_id,
            strategy: config.strategy,
            theta: config.theta,
            records: vec![IterationRecord {
                iteration: 0,
                f1: passive,
                selected_index: None,
                chosen_cluster: None,
                switched: false,
                discovered_red_clusters: discovered,
            }],
            passive_f1: passive,
            switch_iteration: None,
            truncated: false,
            initial_labeled: initial,
            max_kkt_residual: passive_kkt,
        });
    }

    let mut labeled: BTreeSet<usize> = initial.iter().copied().collect();
    let mut unlabeled: Vec<usize> = fold
        .train_indices
        .iter()
        .copied()
        .filter(|i| !labeled.contains(i))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(query_seed(config.seed, fold.fold_id));
    let user = SimulatedUser {
        theta: config.theta,
        scope: config.misclassified_scope,
    };

    let mut fitted = fit(&labeled, dataset, params)?;
    let mut max_kkt = passive_kkt.max(fitted.kkt);
    let mut records = vec![IterationRecord {
        iteration: 0,
        f1: test_f1(&fitted.model, &fold.test_indices, dataset)?,
        selected_index: None,
        chosen_cluster: None,
        switched: false,
        discovered_red_clusters: discovered_red_clusters(&initial, dataset)?,
    }];
    let mut last_class: Option<Label> = None;
    let mut switch_iteration = None;
    let mut truncated = false;

    for iteration in 1..=config.budget {
        if unlabeled.is_empty() {
            truncated = true;
            break;
        }
        let outcome = match config.strategy {
            StrategyKind::ActiveUncertainty => uncertainty_query(&fitted.model, &unlabeled, dataset)?,
            StrategyKind::Guided => {
                let q = guided_query(&unlabeled, dataset, last_class, &mut rng)?;
                last_class = Some(dataset.label(q.selected_index));
                q
            }
            StrategyKind::Random => random_query(&unlabeled, &mut rng)?,
            StrategyKind::Xgl if switch_iteration.is_some() => QueryOutcome {
                switched: true,
                ..random_query(&unlabeled, &mut rng)?
            },
            StrategyKind::Xgl => {
                // Model version = labels added so far.
                let version = (iteration - 1) as u64;
                let explanation = explanation_for(config, fold, dataset, &labeled, &fitted.model, version)?;
                let q = xgl_simulated_query(&explanation, &fitted.model, dataset, &unlabeled, &user, &mut rng)?;
                if q.switched {
                    switch_iteration = Some(iteration);
                }
                q
            }
            StrategyKind::Passive | StrategyKind::XglHuman => unreachable!("handled above"),
        };

        let pos = unlabeled
            .binary_search(&outcome.selected_index)
            .map_err(|_| XglError::AlreadyLabeled(outcome.selected_index))?;
        unlabeled.remove(pos);
        labeled.insert(outcome.selected_index);

        fitted = fit(&labeled, dataset, params)?;
        max_kkt = max_kkt.max(fitted.kkt);

        let labeled_list: Vec<usize> = labeled.iter().copied().collect();
        records.push(IterationRecord {
            iteration,
            f1: test_f1(&fitted.model, &fold.test_indices, dataset)?,
            selected_index: Some(outcome.selected_index),
            chosen_cluster: outcome.chosen_cluster,
            switched: outcome.switched,
            discovered_red_clusters: discovered_red_clusters(&labeled_list, dataset)?,
        });
    }

    Ok(LearningCurve {
        fold_id: fold.fold_id,
        strategy: config.strategy,
        theta: config.theta,
        records,
        passive_f1: passive,
        switch_iteration,
        truncated,
        initial_labeled: initial,
        max_kkt_residual: max_kkt,
    })
}

/// Per-iteration mean and (population) standard deviation across curves.
/// Iterations missing from truncated curves are averaged over the curves
/// that reach them.
pub fn aggregate<'a>(series: impl IntoIterator<Item = &'a [f64]>) -> (Vec<f64>, Vec<f64>) {
    let series: Vec<&[f64]> = series.into_iter().collect();
    let len = series.iter().map(|s| s.len()).max().unwrap_or(0);
    let mut mean = Vec::with_capacity(len);
    let mut std = Vec::with_capacity(len);
    for t in 0..len {
        let vals: Vec<f64> = series.iter().filter_map(|s| s.get(t).copied()).collect();
        let m = vals.iter().sum::<f64>() / vals.len() as f64;
        let var = vals.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / vals.len() as f64;
        mean.push(m);
        std.push(var.sqrt());
    }
    (mean, std)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSummary {
    pub strategy: StrategyKind,
    pub theta: Theta,
    pub mean_f1: Vec<f64>,
    pub std_f1: Vec<f64>,
    pub mean_discovered: Vec<f64>,
    pub mean_passive_f1: f64,
    pub switch_iterations: Vec<Option<usize>>,
    /// Mean over folds of the switch iteration; folds that never switch
    /// count as the budget. `None` for strategies other than XGL.
    pub mean_switch_iteration: Option<f64>,
}

impl ExperimentSummary {
    /// Mean F1 at the rounded mean switch iteration, i.e. where the switch
    /// marker sits on the mean curve.
    pub fn f1_at_mean_switch(&self) -> Option<f64> {
        let t = self.mean_switch_iteration?.round() as usize;
        self.mean_f1.get(t.min(self.mean_f1.len().saturating_sub(1))).copied()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    pub config: ExperimentConfig,
    pub curves: Vec<LearningCurve>,
    pub summary: ExperimentSummary,
}

pub fn summarize(config: &ExperimentConfig, curves: &[LearningCurve]) -> ExperimentSummary {
    let f1: Vec<Vec<f64>> = curves.iter().map(LearningCurve::f1_series).collect();
    let (mean_f1, std_f1) = aggregate(f1.iter().map(Vec::as_slice));
    let disc: Vec<Vec<f64>> = curves
        .iter()
        .map(|c| c.records.iter().map(|r| r.discovered_red_clusters as f64).collect())
        .collect();
    let (mean_discovered, _) = aggregate(disc.iter().map(Vec::as_slice));
    let mean_passive_f1 = curves.iter().map(|c| c.passive_f1).sum::<f64>() / curves.len().max(1) as f64;
    let switch_iterations: Vec<Option<usize>> = curves.iter().map(|c| c.switch_iteration).collect();
    let mean_switch_iteration = (config.strategy == StrategyKind::Xgl && !curves.is_empty()).then(|| {
        curves
            .iter()
            .map(|c| c.switch_iteration.unwrap_or(c.records.len() - 1) as f64)
            .sum::<f64>()
            / curves.len() as f64
    });
    ExperimentSummary {
        strategy: config.strategy,
        theta: config.theta,
        mean_f1,
        std_f1,
        mean_discovered,
        mean_passive_f1,
        switch_iterations,
        mean_switch_iteration,
    }
}

/// Runs every fold (in parallel) and aggregates the curves.
pub fn run_experiment(config: &ExperimentConfig, dataset: &Dataset) -> Result<ExperimentResult> {
    config.validate()?;
    let folds = stratified_kfold(dataset, config.folds, config.seed)?;
    let curves = folds
        .par_iter()
        .map(|fold| run_fold(config, fold, dataset))
        .collect::<Result<Vec<_>>>()?;
    let summary = summarize(config, &curves);
    Ok(ExperimentResult {
        config: config.clone(),
        curves,
        summary,
    })
}
