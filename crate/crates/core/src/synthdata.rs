//! Synthetic rare-class benchmark, stratified folds and initial training sets.
//!
//! Red (positive) points are drawn from Gaussian blobs centred on a regular
//! grid inside the unit square; blue points are spread uniformly over the
//! remaining space, never closer than `exclusion_radius` to a grid centre.

use std::collections::BTreeSet;
use std::fmt;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Result, XglError};

/// Upper bound on rejected blue draws per requested blue point.
const REJECTION_ATTEMPTS_PER_POINT: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point2 {
    pub x1: f64,
    pub x2: f64,
}

impl Point2 {
    pub const fn new(x1: f64, x2: f64) -> Self {
        Self { x1, x2 }
    }

    pub fn sq_dist(&self, other: &Point2) -> f64 {
        let d1 = self.x1 - other.x1;
        let d2 = self.x2 - other.x2;
        d1 * d1 + d2 * d2
    }

    pub fn dist(&self, other: &Point2) -> f64 {
        self.sq_dist(other).sqrt()
    }

    pub fn in_unit_square(&self) -> bool {
        self.x1.is_finite()
            && self.x2.is_finite()
            && (0.0..=1.0).contains(&self.x1)
            && (0.0..=1.0).contains(&self.x2)
    }
}

/// Binary class label. Red is the positive (minority) class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Red,
    Blue,
}

impl Label {
    /// +1 for red, -1 for blue.
    pub fn sign(self) -> f64 {
        match self {
            Label::Red => 1.0,
            Label::Blue => -1.0,
        }
    }

    pub fn is_red(self) -> bool {
        self == Label::Red
    }

    pub fn other(self) -> Label {
        match self {
            Label::Red => Label::Blue,
            Label::Blue => Label::Red,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Label::Red => "red",
            Label::Blue => "blue",
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Label {
    type Err = XglError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "red" => Ok(Label::Red),
            "blue" => Ok(Label::Blue),
            other => Err(XglError::Parse(format!("unknown label '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LabeledExample {
    pub point: Point2,
    pub label: Label,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassCounts {
    pub red: usize,
    pub blue: usize,
}

impl ClassCounts {
    pub fn total(&self) -> usize {
        self.red + self.blue
    }

    pub fn get(&self, label: Label) -> usize {
        match label {
            Label::Red => self.red,
            Label::Blue => self.blue,
        }
    }
}

/// Bookkeeping left behind by [`generate_synthetic`]: the grid centres and the
/// centre each red point was drawn around.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorMeta {
    pub centers: Vec<Point2>,
    pub source_cluster: Vec<Option<usize>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    examples: Vec<LabeledExample>,
    seed: Option<u64>,
    counts: ClassCounts,
    generator: Option<GeneratorMeta>,
}

impl Dataset {
    pub fn from_examples(examples: Vec<LabeledExample>) -> Self {
        let counts = count_classes(&examples);
        Self {
            examples,
            seed: None,
            counts,
            generator: None,
        }
    }

    pub fn examples(&self) -> &[LabeledExample] {
        &self.examples
    }

    pub fn len(&self) -> usize {
        self.examples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.examples.is_empty()
    }

    pub fn point(&self, index: usize) -> Point2 {
        self.examples[index].point
    }

    pub fn label(&self, index: usize) -> Label {
        self.examples[index].label
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn counts(&self) -> ClassCounts {
        self.counts
    }

    pub fn generator(&self) -> Option<&GeneratorMeta> {
        self.generator.as_ref()
    }

    pub fn indices_of(&self, label: Label) -> Vec<usize> {
        self.examples
            .iter()
            .enumerate()
            .filter(|(_, e)| e.label == label)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(writer);
        wtr.write_record(["x1", "x2", "label"])?;
        for e in &self.examples {
            wtr.write_record([
                e.point.x1.to_string(),
                e.point.x2.to_string(),
                e.label.to_string(),
            ])?;
        }
        wtr.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        #[derive(Deserialize)]
        struct Row {
            x1: f64,
            x2: f64,
            label: Label,
        }
        let mut rdr = csv::Reader::from_reader(reader);
        let headers = rdr.headers()?.clone();
        if headers.iter().collect::<Vec<_>>() != ["x1", "x2", "label"] {
            return Err(XglError::Parse(format!(
                "expected header x1,x2,label, found {}",
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let mut examples = Vec::new();
        for row in rdr.deserialize() {
            let row: Row = row?;
            let point = Point2::new(row.x1, row.x2);
            if !point.in_unit_square() {
                return Err(XglError::PointOutOfRange {
                    x1: row.x1,
                    x2: row.x2,
                });
            }
            examples.push(LabeledExample {
                point,
                label: row.label,
            });
        }
        Ok(Self::from_examples(examples))
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        self.write_csv(std::fs::File::create(path)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::read_csv(std::fs::File::open(path)?)
    }
}

fn count_classes(examples: &[LabeledExample]) -> ClassCounts {
    let red = examples.iter().filter(|e| e.label.is_red()).count();
    ClassCounts {
        red,
        blue: examples.len() - red,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticConfig {
    pub n_blue: usize,
    pub n_red: usize,
    pub grid_side: usize,
    pub cluster_std: f64,
    pub exclusion_radius: f64,
    pub seed: u64,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        Self {
            n_blue: 941,
            n_red: 100,
            grid_side: 5,
            cluster_std: 0.02,
            exclusion_radius: 0.06,
            seed: 0,
        }
    }
}

impl SyntheticConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_blue == 0 || self.n_red == 0 {
            return Err(XglError::InvalidConfig("class counts must be positive".into()));
        }
        if self.grid_side == 0 {
            return Err(XglError::InvalidConfig("grid_side must be positive".into()));
        }
        if !(self.cluster_std > 0.0 && self.cluster_std.is_finite()) {
            return Err(XglError::InvalidConfig("cluster_std must be positive".into()));
        }
        if !(self.exclusion_radius >= self.cluster_std && self.exclusion_radius.is_finite()) {
            return Err(XglError::InvalidConfig(
                "exclusion_radius must be at least cluster_std".into(),
            ));
        }
        Ok(())
    }

    /// Cluster centres at the midpoints of a `grid_side`×`grid_side` tiling of
    /// the unit square, row-major in (x2, x1).
    pub fn centers(&self) -> Vec<Point2> {
        let g = self.grid_side;
        let step = 1.0 / g as f64;
        (0..g)
            .flat_map(|row| {
                (0..g).map(move |col| {
                    Point2::new((col as f64 + 0.5) * step, (row as f64 + 0.5) * step)
                })
            })
            .collect()
    }
}

pub fn generate_synthetic(config: &SyntheticConfig) -> Result<Dataset> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let centers = config.centers();
    let offset = Normal::new(0.0, config.cluster_std)
        .map_err(|e| XglError::InvalidConfig(e.to_string()))?;

    let mut tagged: Vec<(LabeledExample, Option<usize>)> =
        Vec::with_capacity(config.n_red + config.n_blue);

    for _ in 0..config.n_red {
        let c = rng.random_range(0..centers.len());
        let center = centers[c];
        let x1 = (center.x1 + offset.sample(&mut rng)).clamp(0.0, 1.0);
        let x2 = (center.x2 + offset.sample(&mut rng)).clamp(0.0, 1.0);
        tagged.push((
            LabeledExample {
                point: Point2::new(x1, x2),
                label: Label::Red,
            },
            Some(c),
        ));
    }

    let max_attempts = config.n_blue.saturating_mul(REJECTION_ATTEMPTS_PER_POINT);
    let r2 = config.exclusion_radius * config.exclusion_radius;
    let mut attempts = 0;
    let mut placed = 0;
    while placed < config.n_blue {
        if attempts >= max_attempts {
            return Err(XglError::RejectionLimit {
                attempts,
                radius: config.exclusion_radius,
            });
        }
        attempts += 1;
        let p = Point2::new(rng.random::<f64>(), rng.random::<f64>());
        if centers.iter().all(|c| c.sq_dist(&p) >= r2) {
            tagged.push((
                LabeledExample {
                    point: p,
                    label: Label::Blue,
                },
                None,
            ));
            placed += 1;
        }
    }

    tagged.shuffle(&mut rng);
    let (examples, source_cluster): (Vec<_>, Vec<_>) = tagged.into_iter().unzip();
    let counts = count_classes(&examples);
    Ok(Dataset {
        examples,
        seed: Some(config.seed),
        counts,
        generator: Some(GeneratorMeta {
            centers,
            source_cluster,
        }),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldSplit {
    pub fold_id: usize,
    pub train_indices: Vec<usize>,
    pub test_indices: Vec<usize>,
}

/// Stratified k-fold partition. Each class is shuffled, the shuffled classes
/// are concatenated and dealt round-robin, so per-class and total fold sizes
/// differ by at most one.
pub fn stratified_kfold(dataset: &Dataset, k: usize, seed: u64) -> Result<Vec<FoldSplit>> {
    if k < 2 {
        return Err(XglError::InvalidConfig(format!("need k >= 2 folds, got {k}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut dealt = Vec::with_capacity(dataset.len());
    for label in [Label::Red, Label::Blue] {
        let mut members = dataset.indices_of(label);
        if members.len() < k {
            return Err(XglError::InsufficientClass {
                label: label.to_string(),
                available: members.len(),
                required: k,
            });
        }
        members.shuffle(&mut rng);
        dealt.extend(members);
    }

    let mut test_sets = vec![Vec::new(); k];
    for (pos, idx) in dealt.into_iter().enumerate() {
        test_sets[pos % k].push(idx);
    }

    let mut fold_of = vec![0usize; dataset.len()];
    for (f, set) in test_sets.iter().enumerate() {
        for &i in set {
            fold_of[i] = f;
        }
    }

    Ok(test_sets
        .into_iter()
        .enumerate()
        .map(|(fold_id, mut test_indices)| {
            test_indices.sort_unstable();
            let train_indices = (0..dataset.len()).filter(|&i| fold_of[i] != fold_id).collect();
            FoldSplit {
                fold_id,
                train_indices,
                test_indices,
            }
        })
        .collect())
}

pub const INITIAL_SET_SIZE: usize = 5;
pub const INITIAL_MIN_PER_CLASS: usize = 2;

/// Draws five train-pool indices with at least two per class, uniformly over
/// all feasible subsets. The red count is drawn proportionally to the number of
/// subsets having it, then each class is sampled without replacement.
pub fn initial_training_set(split: &FoldSplit, dataset: &Dataset, seed: u64) -> Result<Vec<usize>> {
    let reds: Vec<usize> = split
        .train_indices
        .iter()
        .copied()
        .filter(|&i| dataset.label(i).is_red())
        .collect();
    let blues: Vec<usize> = split
        .train_indices
        .iter()
        .copied()
        .filter(|&i| !dataset.label(i).is_red())
        .collect();
    for (label, pool) in [(Label::Red, &reds), (Label::Blue, &blues)] {
        if pool.len() < INITIAL_MIN_PER_CLASS {
            return Err(XglError::InsufficientClass {
                label: label.to_string(),
                available: pool.len(),
                required: INITIAL_MIN_PER_CLASS,
            });
        }
    }

    let red_options: Vec<(usize, f64)> = (INITIAL_MIN_PER_CLASS..=INITIAL_SET_SIZE - INITIAL_MIN_PER_CLASS)
        .filter(|&r| r <= reds.len() && INITIAL_SET_SIZE - r <= blues.len())
        .map(|r| (r, binomial(reds.len(), r) * binomial(blues.len(), INITIAL_SET_SIZE - r)))
        .collect();
    let total: f64 = red_options.iter().map(|(_, w)| w).sum();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut u = rng.random::<f64>() * total;
    let mut n_red = red_options[red_options.len() - 1].0;
    for &(r, w) in &red_options {
        if u < w {
            n_red = r;
            break;
        }
        u -= w;
    }

    let mut chosen: BTreeSet<usize> = BTreeSet::new();
    chosen.extend(reds.choose_multiple(&mut rng, n_red).copied());
    chosen.extend(blues.choose_multiple(&mut rng, INITIAL_SET_SIZE - n_red).copied());
    Ok(chosen.into_iter().collect())
}

fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}
