//! Live XGL session: the supervisor inspects the explanation and labels
//! points one at a time.
//!
//! Mutations are serialized behind a write lock and versioned: every request
//! carries the `model_version` the client last saw, and a request made
//! against an older version is rejected, so each version admits exactly one
//! successful label.

use std::collections::BTreeSet;
use std::sync::RwLock;

use serde::{Deserialize, Serialize};

use crate::engine::{explanation_for, initial_set_seed, rasterize_surface, ExperimentConfig, SurfaceRaster};
use crate::error::{Result, XglError};
use crate::explainer::GlobalExplanation;
use crate::learner::{f1_score, svm_fit, SvmModel};
use crate::strategies::StrategyKind;
use crate::synthdata::{
    generate_synthetic, initial_training_set, stratified_kfold, Dataset, FoldSplit, Label, LabeledExample, Point2,
};

/// A label from the supervisor, either for an existing pool point or for a
/// new point anywhere in the unit square.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LabelRequest {
    /// Version the client saw when choosing the point.
    pub model_version: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub instance_index: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub point: Option<Point2>,
    pub label: Label,
}

impl LabelRequest {
    pub fn for_index(model_version: u64, index: usize, label: Label) -> Self {
        Self {
            model_version,
            instance_index: Some(index),
            point: None,
            label,
        }
    }

    pub fn for_point(model_version: u64, point: Point2, label: Label) -> Self {
        Self {
            model_version,
            instance_index: None,
            point: Some(point),
            label,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoolPoint {
    pub index: usize,
    pub x1: f64,
    pub x2: f64,
    pub predicted: Label,
    /// Ground truth, or the supervisor's label for points they added.
    pub truth: Label,
    pub labeled: bool,
}

/// Everything a client needs to render the session.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionView {
    pub config: ExperimentConfig,
    pub test_fold: usize,
    pub labeled: Vec<usize>,
    pub model_version: u64,
    pub explanation: GlobalExplanation,
    /// Test-fold F1 after each model version, starting with the initial model.
    pub f1_history: Vec<f64>,
    pub surface: SurfaceRaster,
    pub points: Vec<PoolPoint>,
}

struct Session {
    config: ExperimentConfig,
    split: FoldSplit,
    /// Generated data plus any points the supervisor added; labeled points
    /// carry the supervisor's label.
    data: Dataset,
    truth: Dataset,
    /// Sorted pool indices; added points are appended at the end.
    pool: Vec<usize>,
    labeled: BTreeSet<usize>,
    model: SvmModel,
    model_version: u64,
    explanation: GlobalExplanation,
    f1_history: Vec<f64>,
    surface: SurfaceRaster,
}

impl Session {
    fn start(config: &ExperimentConfig) -> Result<Self> {
        let mut config = config.clone();
        config.strategy = StrategyKind::XglHuman;
        config.validate()?;
        let truth = generate_synthetic(&config.synthetic_config())?;
        let folds = stratified_kfold(&truth, config.folds, config.seed)?;
        let split = folds.into_iter().nth(config.test_fold).expect("validated test_fold");
        let initial = initial_training_set(&split, &truth, initial_set_seed(config.seed, split.fold_id))?;
        let mut session = Self {
            pool: split.train_indices.clone(),
            labeled: initial.into_iter().collect(),
            data: truth.clone(),
            truth,
            split,
            model: SvmModel::constant(Label::Blue, config.svm_params()),
            model_version: 0,
            explanation: GlobalExplanation {
                clusters: Vec::new(),
                k: 0,
                weight_w: config.w,
                model_version: 0,
            },
            f1_history: Vec::new(),
            surface: SurfaceRaster {
                resolution: 0,
                values: Vec::new(),
                model_version: 0,
            },
            config,
        };
        session.refresh()?;
        Ok(session)
    }

    /// Refits the model and rebuilds everything derived from it.
    fn refresh(&mut self) -> Result<()> {
        let pairs: Vec<_> = self.labeled.iter().map(|&i| (self.data.point(i), self.data.label(i))).collect();
        let model = svm_fit(&pairs, self.config.svm_params())?;
        let explanation = explanation_for(
            &self.config,
            &FoldSplit {
                fold_id: self.split.fold_id,
                train_indices: self.pool.clone(),
                test_indices: Vec::new(),
            },
            &self.data,
            &self.labeled,
            &model,
            self.model_version,
        )?;
        let preds: Vec<Label> = self.split.test_indices.iter().map(|&i| model.predict(&self.data.point(i))).collect();
        let truth: Vec<Label> = self.split.test_indices.iter().map(|&i| self.data.label(i)).collect();
        let f1 = f1_score(&preds, &truth)?;
        self.surface = rasterize_surface(&model, self.config.raster_resolution, self.model_version)?;
        self.explanation = explanation;
        self.model = model;
        self.f1_history.push(f1);
        Ok(())
    }

    fn label(&mut self, request: &LabelRequest) -> Result<()> {
        if request.model_version != self.model_version {
            return Err(XglError::VersionConflict {
                client: request.model_version,
                current: self.model_version,
            });
        }
        let mut examples = self.data.examples().to_vec();
        let index = match (request.instance_index, request.point) {
            (Some(i), None) => {
                if self.pool.binary_search(&i).is_err() {
                    return Err(XglError::IndexOutOfRange(i));
                }
                if self.labeled.contains(&i) {
                    return Err(XglError::AlreadyLabeled(i));
                }
                examples[i].label = request.label;
                i
            }
            (None, Some(p)) => {
                if !(p.in_unit_square() && p.x1.is_finite() && p.x2.is_finite()) {
                    return Err(XglError::PointOutOfRange { x1: p.x1, x2: p.x2 });
                }
                examples.push(LabeledExample {
                    point: p,
                    label: request.label,
                });
                examples.len() - 1
            }
            _ => {
                return Err(XglError::Parse(
                    "label request needs exactly one of instance_index and point".into(),
                ))
            }
        };

        // Work on a copy so a failed refit leaves the session untouched.
        let mut next = Self {
            config: self.config.clone(),
            split: self.split.clone(),
            data: Dataset::from_examples(examples),
            truth: self.truth.clone(),
            pool: self.pool.clone(),
            labeled: self.labeled.clone(),
            model: self.model.clone(),
            model_version: self.model_version + 1,
            explanation: self.explanation.clone(),
            f1_history: self.f1_history.clone(),
            surface: self.surface.clone(),
        };
        if index >= self.truth.len() && next.pool.last().is_none_or(|&last| last < index) {
            next.pool.push(index);
        }
        next.labeled.insert(index);
        next.refresh()?;
        *self = next;
        Ok(())
    }

    fn view(&self) -> SessionView {
        let points = self
            .pool
            .iter()
            .map(|&i| {
                let p = self.data.point(i);
                PoolPoint {
                    index: i,
                    x1: p.x1,
                    x2: p.x2,
                    predicted: self.model.predict(&p),
                    truth: if i < self.truth.len() { self.truth.label(i) } else { self.data.label(i) },
                    labeled: self.labeled.contains(&i),
                }
            })
            .collect();
        SessionView {
            config: self.config.clone(),
            test_fold: self.split.fold_id,
            labeled: self.labeled.iter().copied().collect(),
            model_version: self.model_version,
            explanation: self.explanation.clone(),
            f1_history: self.f1_history.clone(),
            surface: self.surface.clone(),
            points,
        }
    }
}

/// Thread-safe session holder shared by the HTTP handlers.
#[derive(Default)]
pub struct SessionService {
    session: RwLock<Option<Session>>,
}

impl SessionService {
    /// A service with no session; every call but [`reset`](Self::reset) fails
    /// with [`XglError::Uninitialized`].
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_config(config: &ExperimentConfig) -> Result<Self> {
        let service = Self::new();
        service.reset(config)?;
        Ok(service)
    }

    /// Starts a fresh session: regenerates the dataset from the config seed,
    /// holds out fold `test_fold`, draws the initial set and fits. The
    /// strategy is always `xgl_human`; theta is ignored.
    pub fn reset(&self, config: &ExperimentConfig) -> Result<SessionView> {
        let session = Session::start(config)?;
        let view = session.view();
        *self.session.write().expect("session lock poisoned") = Some(session);
        Ok(view)
    }

    pub fn state(&self) -> Result<SessionView> {
        let guard = self.session.read().expect("session lock poisoned");
        guard.as_ref().map(Session::view).ok_or(XglError::Uninitialized)
    }

    pub fn submit_label(&self, request: &LabelRequest) -> Result<SessionView> {
        let mut guard = self.session.write().expect("session lock poisoned");
        let session = guard.as_mut().ok_or(XglError::Uninitialized)?;
        session.label(request)?;
        Ok(session.view())
    }

    /// Decision surface of the current model at a custom resolution.
    pub fn surface(&self, resolution: usize) -> Result<SurfaceRaster> {
        let guard = self.session.read().expect("session lock poisoned");
        let session = guard.as_ref().ok_or(XglError::Uninitialized)?;
        rasterize_surface(&session.model, resolution, session.model_version)
    }
}
