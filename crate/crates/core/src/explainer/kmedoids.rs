//! Partitioning around medoids: greedy BUILD followed by SWAP until no single
//! medoid/non-medoid exchange lowers the total distance to the nearest medoid.
//!
//! SWAP evaluates all `k` exchanges for a candidate in one `O(n)` sweep using
//! each point's nearest and second-nearest medoid, and applies an improving
//! exchange as soon as it is found. Candidates are visited cyclically, in an
//! order fixed by the seed, until a full cycle passes without improvement.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Result, XglError};

/// Minimum cost decrease for a swap to count as an improvement.
pub const SWAP_EPS: f64 = 1e-10;

pub trait Dissimilarity {
    fn len(&self) -> usize;
    fn get(&self, i: usize, j: usize) -> f64;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Dense symmetric dissimilarity matrix.
#[derive(Debug, Clone)]
pub struct DissimilarityMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DissimilarityMatrix {
    pub fn from_fn(n: usize, dist: impl Fn(usize, usize) -> f64) -> Self {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..i {
                let d = dist(i, j);
                data[i * n + j] = d;
                data[j * n + i] = d;
            }
        }
        Self { n, data }
    }

    pub fn euclidean<const D: usize>(points: &[[f64; D]]) -> Self {
        Self::from_fn(points.len(), |i, j| {
            points[i]
                .iter()
                .zip(&points[j])
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt()
        })
    }
}

impl Dissimilarity for DissimilarityMatrix {
    fn len(&self) -> usize {
        self.n
    }

    #[inline]
    fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KMedoidsResult {
    /// Medoid positions, ascending. Cluster `c` is the one with medoid `medoids[c]`.
    pub medoids: Vec<usize>,
    /// Cluster id of every point.
    pub assignment: Vec<usize>,
    pub cost: f64,
    /// Total cost after BUILD and after every applied swap.
    pub cost_trace: Vec<f64>,
}

pub fn total_cost<D: Dissimilarity>(diss: &D, medoids: &[usize]) -> f64 {
    (0..diss.len())
        .map(|o| medoids.iter().map(|&m| diss.get(o, m)).fold(f64::INFINITY, f64::min))
        .sum()
}

#[derive(Debug, Clone, Copy)]
struct Nearest {
    slot: usize,
    dist: f64,
    second: f64,
}

fn nearest_two<D: Dissimilarity>(diss: &D, o: usize, medoids: &[usize]) -> Nearest {
    let mut best = Nearest {
        slot: 0,
        dist: f64::INFINITY,
        second: f64::INFINITY,
    };
    for (slot, &m) in medoids.iter().enumerate() {
        let d = diss.get(o, m);
        if d < best.dist {
            best.second = best.dist;
            best.dist = d;
            best.slot = slot;
        } else if d < best.second {
            best.second = d;
        }
    }
    best
}

fn build<D: Dissimilarity>(diss: &D, k: usize) -> Vec<usize> {
    let n = diss.len();
    let mut medoids = Vec::with_capacity(k);
    let mut is_medoid = vec![false; n];
    let mut near = vec![f64::INFINITY; n];

    for _ in 0..k {
        let mut best: Option<(usize, f64)> = None;
        for c in (0..n).filter(|&c| !is_medoid[c]) {
            // Cost after adding c; equivalent to maximizing the gain.
            let cost: f64 = (0..n).map(|o| near[o].min(diss.get(o, c))).sum();
            if best.is_none_or(|(_, b)| cost < b) {
                best = Some((c, cost));
            }
        }
        let (c, _) = best.expect("k <= n leaves a candidate");
        is_medoid[c] = true;
        medoids.push(c);
        for (o, d) in near.iter_mut().enumerate() {
            *d = d.min(diss.get(o, c));
        }
    }
    medoids
}

pub fn pam<D: Dissimilarity>(diss: &D, k: usize, seed: u64) -> Result<KMedoidsResult> {
    let n = diss.len();
    if k == 0 || k > n {
        return Err(XglError::TooManyClusters { k, n });
    }

    let mut medoids = build(diss, k);
    let mut is_medoid = vec![false; n];
    for &m in &medoids {
        is_medoid[m] = true;
    }
    let mut near: Vec<Nearest> = (0..n).map(|o| nearest_two(diss, o, &medoids)).collect();
    let mut cost: f64 = near.iter().map(|r| r.dist).sum();
    let mut cost_trace = vec![cost];

    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));

    let mut delta = vec![0.0; k];
    let mut since_swap = 0;
    let mut pos = 0;
    while since_swap < n && k < n {
        let c = order[pos];
        pos = (pos + 1) % n;
        since_swap += 1;
        if is_medoid[c] {
            continue;
        }

        // delta[l]: cost change of replacing medoid slot l by c.
        let mut shared = 0.0;
        delta.iter_mut().for_each(|d| *d = 0.0);
        for (o, rec) in near.iter().enumerate() {
            let d = diss.get(o, c);
            if d < rec.dist {
                shared += d - rec.dist;
            } else {
                delta[rec.slot] += d.min(rec.second) - rec.dist;
            }
        }
        let (slot, best) = delta
            .iter()
            .enumerate()
            .map(|(l, d)| (l, d + shared))
            .fold((0, f64::INFINITY), |acc, cur| if cur.1 < acc.1 { cur } else { acc });

        if best < -SWAP_EPS {
            is_medoid[medoids[slot]] = false;
            is_medoid[c] = true;
            medoids[slot] = c;
            for (o, rec) in near.iter_mut().enumerate() {
                *rec = nearest_two(diss, o, &medoids);
            }
            cost = near.iter().map(|r| r.dist).sum();
            cost_trace.push(cost);
            since_swap = 0;
        }
    }

    medoids.sort_unstable();
    let assignment = (0..n).map(|o| nearest_two(diss, o, &medoids).slot).collect();
    let cost = total_cost(diss, &medoids);
    Ok(KMedoidsResult {
        medoids,
        assignment,
        cost,
        cost_trace,
    })
}
