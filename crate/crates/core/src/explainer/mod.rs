//! Clustering-based global explanations.
//!
//! The pool is clustered with k-medoids after appending the label as a third
//! feature (ground truth for labeled points, the model's prediction otherwise).
//! Each cluster is summarized by its medoid, its majority label and the
//! bounding box of its members.

pub mod kmedoids;

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

pub use kmedoids::{pam, Dissimilarity, DissimilarityMatrix, KMedoidsResult};

use crate::error::{Result, XglError};
use crate::learner::SvmModel;
use crate::synthdata::{Dataset, Label, Point2};

pub const DEFAULT_LABEL_WEIGHT: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AugmentedPoint {
    pub x1: f64,
    pub x2: f64,
    /// `w` for red, `0` for blue.
    pub label_feature: f64,
}

impl AugmentedPoint {
    pub fn new(point: Point2, label: Label, w: f64) -> Self {
        Self {
            x1: point.x1,
            x2: point.x2,
            label_feature: if label.is_red() { w } else { 0.0 },
        }
    }

    pub fn dist(&self, other: &AugmentedPoint) -> f64 {
        let a = self.x1 - other.x1;
        let b = self.x2 - other.x2;
        let c = self.label_feature - other.label_feature;
        (a * a + b * b + c * c).sqrt()
    }
}

/// Augments every pool point with its known (if labeled) or predicted label.
pub fn augment(
    pool: &[usize],
    dataset: &Dataset,
    labeled: &BTreeSet<usize>,
    model: &SvmModel,
    w: f64,
) -> Vec<AugmentedPoint> {
    pool.iter()
        .map(|&i| AugmentedPoint::new(dataset.point(i), pool_label(i, dataset, labeled, model), w))
        .collect()
}

fn pool_label(i: usize, dataset: &Dataset, labeled: &BTreeSet<usize>, model: &SvmModel) -> Label {
    if labeled.contains(&i) {
        dataset.label(i)
    } else {
        model.predict(&dataset.point(i))
    }
}

pub fn kmedoids(points: &[AugmentedPoint], k: usize, seed: u64) -> Result<KMedoidsResult> {
    let diss = DissimilarityMatrix::from_fn(points.len(), |i, j| points[i].dist(&points[j]));
    pam(&diss, k, seed)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub x1_min: f64,
    pub x1_max: f64,
    pub x2_min: f64,
    pub x2_max: f64,
}

impl Bounds {
    fn of(points: impl IntoIterator<Item = Point2>) -> Self {
        points.into_iter().fold(
            Bounds {
                x1_min: f64::INFINITY,
                x1_max: f64::NEG_INFINITY,
                x2_min: f64::INFINITY,
                x2_max: f64::NEG_INFINITY,
            },
            |b, p| Bounds {
                x1_min: b.x1_min.min(p.x1),
                x1_max: b.x1_max.max(p.x1),
                x2_min: b.x2_min.min(p.x2),
                x2_max: b.x2_max.max(p.x2),
            },
        )
    }

    pub fn contains(&self, p: &Point2) -> bool {
        (self.x1_min..=self.x1_max).contains(&p.x1) && (self.x2_min..=self.x2_max).contains(&p.x2)
    }
}

impl fmt::Display for Bounds {
    /// Three decimals, rounded outward so the printed box still contains
    /// every member.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lo = |v: f64| (v * 1000.0).floor() / 1000.0;
        let hi = |v: f64| (v * 1000.0).ceil() / 1000.0;
        write!(
            f,
            "x1 in [{:.3}, {:.3}] and x2 in [{:.3}, {:.3}]",
            lo(self.x1_min),
            hi(self.x1_max),
            lo(self.x2_min),
            hi(self.x2_max)
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cluster {
    pub id: usize,
    /// Dataset index of the prototype.
    pub medoid_index: usize,
    pub medoid: Point2,
    pub member_indices: Vec<usize>,
    pub majority_label: Label,
    pub bounds: Bounds,
    pub description: String,
}

impl Cluster {
    pub fn member_count(&self) -> usize {
        self.member_indices.len()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GlobalExplanation {
    pub clusters: Vec<Cluster>,
    pub k: usize,
    pub weight_w: f64,
    pub model_version: u64,
}

/// Per-cluster summary without member lists.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterSummary {
    pub id: usize,
    pub medoid: Point2,
    pub majority_label: Label,
    pub bounds: Bounds,
    pub member_count: usize,
    pub description: String,
}

impl GlobalExplanation {
    pub fn cluster_of(&self, index: usize) -> Option<usize> {
        self.clusters
            .iter()
            .position(|c| c.member_indices.binary_search(&index).is_ok())
    }

    pub fn pool_size(&self) -> usize {
        self.clusters.iter().map(Cluster::member_count).sum()
    }

    pub fn summary(&self) -> Vec<ClusterSummary> {
        self.clusters
            .iter()
            .map(|c| ClusterSummary {
                id: c.id,
                medoid: c.medoid,
                majority_label: c.majority_label,
                bounds: c.bounds,
                member_count: c.member_count(),
                description: c.description.clone(),
            })
            .collect()
    }

    /// One line per cluster, for terminal output.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        for c in &self.clusters {
            out.push_str(&format!(
                "cluster {} ({} points, prototype ({:.3}, {:.3})): {}\n",
                c.id,
                c.member_count(),
                c.medoid.x1,
                c.medoid.x2,
                c.description
            ));
        }
        out
    }
}

/// Clusters the pool (`pool`, typically the training split) and summarizes
/// each cluster. `model_version` tags the explanation with the model it
/// describes.
#[allow(clippy::too_many_arguments)]
pub fn build_explanation(
    dataset: &Dataset,
    pool: &[usize],
    labeled: &BTreeSet<usize>,
    model: &SvmModel,
    k: usize,
    w: f64,
    seed: u64,
    model_version: u64,
) -> Result<GlobalExplanation> {
    let labels: Vec<Label> = pool
        .iter()
        .map(|&i| pool_label(i, dataset, labeled, model))
        .collect();
    let points: Vec<AugmentedPoint> = pool
        .iter()
        .zip(&labels)
        .map(|(&i, &l)| AugmentedPoint::new(dataset.point(i), l, w))
        .collect();
    let result = kmedoids(&points, k, seed)?;

    let mut members: Vec<Vec<usize>> = vec![Vec::new(); k];
    let mut red_votes = vec![0usize; k];
    for (pos, &cluster) in result.assignment.iter().enumerate() {
        members[cluster].push(pool[pos]);
        if labels[pos].is_red() {
            red_votes[cluster] += 1;
        }
    }

    let clusters = members
        .into_iter()
        .enumerate()
        .map(|(id, mut member_indices)| {
            member_indices.sort_unstable();
            let medoid_index = pool[result.medoids[id]];
            let blue_votes = member_indices.len() - red_votes[id];
            let majority_label = if red_votes[id] >= blue_votes { Label::Red } else { Label::Blue };
            let bounds = Bounds::of(member_indices.iter().map(|&i| dataset.point(i)));
            let description = format!("{bounds}, predicted {majority_label}");
            Cluster {
                id,
                medoid_index,
                medoid: dataset.point(medoid_index),
                member_indices,
                majority_label,
                bounds,
                description,
            }
        })
        .collect();

    Ok(GlobalExplanation {
        clusters,
        k,
        weight_w: w,
        model_version,
    })
}

/// Agreement between the explanation (each point gets its cluster's majority
/// label) and the model, under 0/1 loss, over the clustered pool.
pub fn surrogate_fidelity(
    explanation: &GlobalExplanation,
    model: &SvmModel,
    model_version: u64,
    dataset: &Dataset,
) -> Result<f64> {
    if explanation.model_version != model_version {
        return Err(XglError::StaleExplanation {
            explanation: explanation.model_version,
            model: model_version,
        });
    }
    let total = explanation.pool_size();
    if total == 0 {
        return Err(XglError::Empty("explanation"));
    }
    let agree: usize = explanation
        .clusters
        .iter()
        .map(|c| {
            c.member_indices
                .iter()
                .filter(|&&i| model.predict(&dataset.point(i)) == c.majority_label)
                .count()
        })
        .sum();
    Ok(agree as f64 / total as f64)
}
