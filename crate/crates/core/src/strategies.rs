//! Query selection policies.
//!
//! All randomized strategies draw from a caller-owned RNG so that a run is a
//! deterministic function of its seed and the sequence of calls.

use std::fmt;
use std::str::FromStr;

use rand::seq::IndexedRandom;
use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Result, XglError};
use crate::explainer::GlobalExplanation;
use crate::learner::SvmModel;
use crate::synthdata::{Dataset, Label};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StrategyKind {
    ActiveUncertainty,
    Guided,
    Random,
    Xgl,
    XglHuman,
    Passive,
}

impl StrategyKind {
    pub const BATCH: [StrategyKind; 5] = [
        StrategyKind::Xgl,
        StrategyKind::Guided,
        StrategyKind::ActiveUncertainty,
        StrategyKind::Random,
        StrategyKind::Passive,
    ];

    /// Short name used on the command line and in result files.
    pub fn as_str(self) -> &'static str {
        match self {
            StrategyKind::ActiveUncertainty => "al",
            StrategyKind::Guided => "gl",
            StrategyKind::Random => "random",
            StrategyKind::Xgl => "xgl",
            StrategyKind::XglHuman => "xgl_human",
            StrategyKind::Passive => "passive",
        }
    }

    pub fn uses_theta(self) -> bool {
        self == StrategyKind::Xgl
    }
}

impl fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for StrategyKind {
    type Err = XglError;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim().to_ascii_lowercase().as_str() {
            "al" | "active" | "active_uncertainty" | "uncertainty" => StrategyKind::ActiveUncertainty,
            "gl" | "guided" => StrategyKind::Guided,
            "random" => StrategyKind::Random,
            "xgl" | "xgl_simulated" => StrategyKind::Xgl,
            "xgl_human" | "human" => StrategyKind::XglHuman,
            "passive" => StrategyKind::Passive,
            other => {
                return Err(XglError::Parse(format!(
                    "unknown strategy '{other}' (expected one of al, gl, random, xgl, xgl_human, passive)"
                )))
            }
        })
    }
}

impl Serialize for StrategyKind {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for StrategyKind {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Softmax sharpness of the simulated supervisor.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Theta {
    Value(f64),
    /// Always the cluster with the most misclassified points.
    #[default]
    Argmax,
}

impl fmt::Display for Theta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Theta::Value(v) => write!(f, "{v}"),
            Theta::Argmax => f.write_str("argmax"),
        }
    }
}

impl FromStr for Theta {
    type Err = XglError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("argmax") || s.eq_ignore_ascii_case("inf") {
            return Ok(Theta::Argmax);
        }
        let v: f64 = s
            .parse()
            .map_err(|_| XglError::Parse(format!("theta must be a number or 'argmax', got '{s}'")))?;
        if !(v.is_finite() && v >= 0.0) {
            return Err(XglError::Parse(format!("theta must be finite and non-negative, got {v}")));
        }
        Ok(Theta::Value(v))
    }
}

impl Serialize for Theta {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Theta::Value(v) => s.serialize_f64(*v),
            Theta::Argmax => s.serialize_str("argmax"),
        }
    }
}

impl<'de> Deserialize<'de> for Theta {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Theta::from_str(&v.to_string()),
            Raw::Text(s) => s.parse(),
        }
        .map_err(serde::de::Error::custom)
    }
}

/// Which pool points count towards a cluster's misclassification count.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MisclassifiedScope {
    /// Every pool member of the cluster, labeled or not.
    #[default]
    AllPool,
    UnlabeledOnly,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulatedUser {
    pub theta: Theta,
    pub scope: MisclassifiedScope,
}

impl SimulatedUser {
    pub fn new(theta: Theta) -> Self {
        Self {
            theta,
            scope: MisclassifiedScope::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryOutcome {
    pub selected_index: usize,
    pub chosen_cluster: Option<usize>,
    pub switched: bool,
}

impl QueryOutcome {
    fn plain(selected_index: usize) -> Self {
        Self {
            selected_index,
            chosen_cluster: None,
            switched: false,
        }
    }
}

/// Smallest |decision value| over `unlabeled`; ties go to the lowest index.
pub fn uncertainty_query(model: &SvmModel, unlabeled: &[usize], dataset: &Dataset) -> Result<QueryOutcome> {
    let mut best: Option<(usize, f64)> = None;
    for &i in unlabeled {
        let margin = model.decision_value(&dataset.point(i)).abs();
        let better = match best {
            None => true,
            Some((bi, bm)) => margin < bm || (margin == bm && i < bi),
        };
        if better {
            best = Some((i, margin));
        }
    }
    best.map(|(i, _)| QueryOutcome::plain(i))
        .ok_or(XglError::Empty("unlabeled pool"))
}

/// Class-conditional random sampling alternating between classes, starting
/// with red. Falls back to the other class when the target one is exhausted.
pub fn guided_query<R: Rng + ?Sized>(
    unlabeled: &[usize],
    dataset: &Dataset,
    last_class: Option<Label>,
    rng: &mut R,
) -> Result<QueryOutcome> {
    if unlabeled.is_empty() {
        return Err(XglError::Empty("unlabeled pool"));
    }
    let target = last_class.map_or(Label::Red, Label::other);
    let of_class = |label: Label| -> Vec<usize> {
        unlabeled
            .iter()
            .copied()
            .filter(|&i| dataset.label(i) == label)
            .collect()
    };
    let mut candidates = of_class(target);
    if candidates.is_empty() {
        candidates = of_class(target.other());
    }
    let &chosen = candidates.choose(rng).expect("pool is non-empty");
    Ok(QueryOutcome::plain(chosen))
}

pub fn random_query<R: Rng + ?Sized>(unlabeled: &[usize], rng: &mut R) -> Result<QueryOutcome> {
    unlabeled
        .choose(rng)
        .map(|&i| QueryOutcome::plain(i))
        .ok_or(XglError::Empty("unlabeled pool"))
}

/// Probability of the supervisor picking each cluster given its number of
/// misclassified points: `exp(θ m_i) / Σ_j exp(θ m_j)`, evaluated after
/// subtracting `max m`. `Argmax` puts all mass on the largest count, lowest
/// cluster id on ties.
pub fn cluster_choice_distribution(misclassified_counts: &[usize], theta: Theta) -> Vec<f64> {
    let k = misclassified_counts.len();
    if k == 0 {
        return Vec::new();
    }
    match theta {
        Theta::Argmax => {
            let best = argmax_lowest(misclassified_counts.iter().map(|&m| m as f64));
            (0..k).map(|i| if i == best { 1.0 } else { 0.0 }).collect()
        }
        Theta::Value(t) => {
            let max = *misclassified_counts.iter().max().expect("non-empty") as f64;
            let weights: Vec<f64> = misclassified_counts
                .iter()
                .map(|&m| (t * (m as f64 - max)).exp())
                .collect();
            let total: f64 = weights.iter().sum();
            weights.into_iter().map(|w| w / total).collect()
        }
    }
}

fn argmax_lowest(values: impl Iterator<Item = f64>) -> usize {
    let mut best = (0, f64::NEG_INFINITY);
    for (i, v) in values.enumerate() {
        if v > best.1 {
            best = (i, v);
        }
    }
    best.0
}

/// Simulated supervisor: counts misclassified points per cluster, draws a
/// cluster from [`cluster_choice_distribution`] restricted to clusters holding
/// at least one misclassified unlabeled point, and returns that cluster's
/// misclassified unlabeled point closest to the prototype. With no
/// misclassified unlabeled point left it samples uniformly and reports
/// `switched`.
///
/// `unlabeled` must be sorted ascending.
pub fn xgl_simulated_query<R: Rng + ?Sized>(
    explanation: &GlobalExplanation,
    model: &SvmModel,
    dataset: &Dataset,
    unlabeled: &[usize],
    user: &SimulatedUser,
    rng: &mut R,
) -> Result<QueryOutcome> {
    if unlabeled.is_empty() {
        return Err(XglError::Empty("unlabeled pool"));
    }
    let k = explanation.clusters.len();
    let mut counts = vec![0usize; k];
    let mut candidates: Vec<Vec<usize>> = vec![Vec::new(); k];
    for cluster in &explanation.clusters {
        for &i in &cluster.member_indices {
            let wrong = model.predict(&dataset.point(i)) != dataset.label(i);
            if !wrong {
                continue;
            }
            let is_unlabeled = unlabeled.binary_search(&i).is_ok();
            if is_unlabeled {
                candidates[cluster.id].push(i);
            }
            if is_unlabeled || user.scope == MisclassifiedScope::AllPool {
                counts[cluster.id] += 1;
            }
        }
    }

    if candidates.iter().all(Vec::is_empty) {
        let mut outcome = random_query(unlabeled, rng)?;
        outcome.switched = true;
        return Ok(outcome);
    }

    // Renormalizing over eligible clusters equals applying the choice rule
    // to their counts alone, which also keeps the softmax shift local.
    let eligible: Vec<usize> = (0..k).filter(|&c| !candidates[c].is_empty()).collect();
    let eligible_counts: Vec<usize> = eligible.iter().map(|&c| counts[c]).collect();
    let probs = cluster_choice_distribution(&eligible_counts, user.theta);
    let cluster = eligible[sample_index(&probs, rng)];

    let medoid = explanation.clusters[cluster].medoid;
    let selected = candidates[cluster]
        .iter()
        .copied()
        .min_by(|&a, &b| {
            dataset
                .point(a)
                .sq_dist(&medoid)
                .total_cmp(&dataset.point(b).sq_dist(&medoid))
                .then(a.cmp(&b))
        })
        .expect("eligible cluster has a candidate");

    Ok(QueryOutcome {
        selected_index: selected,
        chosen_cluster: Some(cluster),
        switched: false,
    })
}

/// Draws an index proportionally to non-negative `weights` (not necessarily
/// normalized). Zero-weight entries are never drawn.
fn sample_index<R: Rng + ?Sized>(weights: &[f64], rng: &mut R) -> usize {
    let total: f64 = weights.iter().sum();
    let mut u = rng.random::<f64>() * total;
    let mut last_positive = 0;
    for (i, &w) in weights.iter().enumerate() {
        if w <= 0.0 {
            continue;
        }
        last_positive = i;
        if u < w {
            return i;
        }
        u -= w;
    }
    last_positive
}
