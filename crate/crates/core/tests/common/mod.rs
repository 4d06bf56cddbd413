//! Independent reference implementations used as test oracles. Nothing here
//! calls into the solver or clustering code under test.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use xgl::synthdata::{Label, Point2};

pub fn rbf(gamma: f64, a: &Point2, b: &Point2) -> f64 {
    let d1 = a.x1 - b.x1;
    let d2 = a.x2 - b.x2;
    (-gamma * (d1 * d1 + d2 * d2)).exp()
}

/// `Q_ij = y_i y_j K(x_i, x_j)`.
pub fn dual_matrix(examples: &[(Point2, Label)], gamma: f64) -> Vec<Vec<f64>> {
    examples
        .iter()
        .map(|(a, la)| {
            examples
                .iter()
                .map(|(b, lb)| la.sign() * lb.sign() * rbf(gamma, a, b))
                .collect()
        })
        .collect()
}

/// Dual objective in maximization form: `sum(a) - a'Qa / 2`.
pub fn dual_objective(q: &[Vec<f64>], alpha: &[f64]) -> f64 {
    let quad: f64 = (0..alpha.len())
        .map(|i| (0..alpha.len()).map(|j| alpha[i] * q[i][j] * alpha[j]).sum::<f64>())
        .sum();
    alpha.iter().sum::<f64>() - 0.5 * quad
}

/// Euclidean projection onto `{0 <= a <= c, y'a = 0}`: `a = clip(v - l y)`
/// with the scalar `l` found by bisection (`y'a` is non-increasing in `l`).
pub fn project(v: &[f64], y: &[f64], c: f64) -> Vec<f64> {
    let at = |l: f64| -> Vec<f64> { v.iter().zip(y).map(|(vi, yi)| (vi - l * yi).clamp(0.0, c)).collect() };
    let g = |l: f64| -> f64 { at(l).iter().zip(y).map(|(a, yi)| a * yi).sum() };
    let span = v.iter().map(|x| x.abs()).fold(0.0, f64::max) + c + 1.0;
    let (mut lo, mut hi) = (-span, span);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    at(0.5 * (lo + hi))
}

/// Accelerated projected gradient (FISTA) on the SVM dual. Returns the
/// multipliers and the dual objective (maximization form).
pub fn projected_gradient_dual(examples: &[(Point2, Label)], gamma: f64, c: f64, iterations: usize) -> (Vec<f64>, f64) {
    let n = examples.len();
    let q = dual_matrix(examples, gamma);
    let y: Vec<f64> = examples.iter().map(|(_, l)| l.sign()).collect();
    // Gershgorin bound on the largest eigenvalue.
    let lipschitz = q.iter().map(|row| row.iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max);
    let step = 1.0 / lipschitz;

    let mut x = vec![0.0; n];
    let mut z = x.clone();
    let mut t = 1.0_f64;
    for _ in 0..iterations {
        // Gradient of the minimization form: Qz - 1.
        let grad: Vec<f64> = (0..n).map(|i| (0..n).map(|j| q[i][j] * z[j]).sum::<f64>() - 1.0).collect();
        let v: Vec<f64> = z.iter().zip(&grad).map(|(zi, gi)| zi - step * gi).collect();
        let next = project(&v, &y, c);
        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        z = next
            .iter()
            .zip(&x)
            .map(|(a, b)| a + (t - 1.0) / t_next * (a - b))
            .collect();
        x = next;
        t = t_next;
    }
    let obj = dual_objective(&q, &x);
    (x, obj)
}

/// Random problem in the unit square with both classes present.
pub fn random_problem(n: usize, seed: u64) -> Vec<(Point2, Label)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let ex: Vec<(Point2, Label)> = (0..n)
            .map(|_| {
                let p = Point2::new(rng.random::<f64>(), rng.random::<f64>());
                let l = if rng.random::<f64>() < 0.5 { Label::Red } else { Label::Blue };
                (p, l)
            })
            .collect();
        let reds = ex.iter().filter(|(_, l)| l.is_red()).count();
        if reds > 0 && reds < n {
            return ex;
        }
    }
}

pub fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

pub fn medoid_cost(points: &[Vec<f64>], medoids: &[usize]) -> f64 {
    points
        .iter()
        .map(|p| medoids.iter().map(|&m| euclid(p, &points[m])).fold(f64::INFINITY, f64::min))
        .sum()
}

/// Best improvement over every (medoid, non-medoid) swap; positive means the
/// medoid set is not swap-optimal.
pub fn best_single_swap_gain(points: &[Vec<f64>], medoids: &[usize]) -> f64 {
    let base = medoid_cost(points, medoids);
    let mut best = f64::NEG_INFINITY;
    for slot in 0..medoids.len() {
        for cand in (0..points.len()).filter(|c| !medoids.contains(c)) {
            let mut trial = medoids.to_vec();
            trial[slot] = cand;
            best = best.max(base - medoid_cost(points, &trial));
        }
    }
    best
}

/// Points with some cluster structure so swaps matter.
pub fn clustered_points(n: usize, dim: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let centers: Vec<Vec<f64>> = (0..4).map(|_| (0..dim).map(|_| rng.random::<f64>()).collect()).collect();
    (0..n)
        .map(|_| {
            let c = &centers[rng.random_range(0..centers.len())];
            c.iter().map(|v| v + 0.15 * (rng.random::<f64>() - 0.5)).collect()
        })
        .collect()
}
