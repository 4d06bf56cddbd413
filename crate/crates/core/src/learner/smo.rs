//! Sequential minimal optimization for the soft-margin SVM dual.
//!
//! We solve
//!
//! ```text
//! min_a  ½ aᵀQa − eᵀa    s.t.  yᵀa = 0,  0 ≤ a_t ≤ C
//! ```
//!
//! with `Q_ij = y_i y_j K(x_i, x_j)`, picking at each step the maximal
//! violating pair (first-order working set selection) and solving the
//! two-variable subproblem analytically.

use crate::error::{Result, XglError};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoSettings {
    /// Stopping threshold on the maximal KKT violation `m(a) - M(a)`.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for SmoSettings {
    fn default() -> Self {
        Self {
            tolerance: 1e-7,
            max_iterations: 10_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SmoSolution {
    pub alpha: Vec<f64>,
    pub bias: f64,
    /// Dual objective in maximization form, `eᵀa − ½ aᵀQa`.
    pub dual_objective: f64,
    pub iterations: usize,
}

const TAU: f64 = 1e-12;

/// Solves the dual given the full kernel matrix (row-major, `n × n`) and
/// targets in {-1, +1}. Both classes must be present.
pub fn solve(kernel: &[f64], y: &[f64], c: f64, settings: &SmoSettings) -> Result<SmoSolution> {
    let n = y.len();
    debug_assert_eq!(kernel.len(), n * n);
    let q = |i: usize, j: usize| y[i] * y[j] * kernel[i * n + j];

    let mut alpha = vec![0.0; n];
    let mut grad = vec![-1.0; n];
    let mut iterations = 0;

    while let Some((i, j, violation)) = select_pair(&alpha, &grad, y, c) {
        if violation <= settings.tolerance {
            break;
        }
        if iterations >= settings.max_iterations {
            return Err(XglError::NonConvergence {
                iterations,
                violation,
            });
        }
        iterations += 1;

        let old_i = alpha[i];
        let old_j = alpha[j];
        let mut curvature = q(i, i) + q(j, j) - 2.0 * y[i] * y[j] * q(i, j);
        if curvature <= 0.0 {
            curvature = TAU;
        }

        if y[i] != y[j] {
            let delta = (-grad[i] - grad[j]) / curvature;
            let diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if diff > 0.0 {
                if alpha[j] < 0.0 {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if diff > 0.0 {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = c - diff;
                }
            } else if alpha[j] > c {
                alpha[j] = c;
                alpha[i] = c + diff;
            }
        } else {
            let delta = (grad[i] - grad[j]) / curvature;
            let sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if sum > c {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = sum - c;
                }
            } else if alpha[j] < 0.0 {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if sum > c {
                if alpha[j] > c {
                    alpha[j] = c;
                    alpha[i] = sum - c;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }

        let di = alpha[i] - old_i;
        let dj = alpha[j] - old_j;
        for (t, g) in grad.iter_mut().enumerate() {
            *g += q(t, i) * di + q(t, j) * dj;
        }
    }

    let bias = compute_bias(&alpha, &grad, y, c);
    // G = Qa − e, so ½aᵀQa = ½ Σ a_t (G_t + 1).
    let dual_objective = alpha
        .iter()
        .zip(&grad)
        .map(|(a, g)| a - 0.5 * a * (g + 1.0))
        .sum();

    Ok(SmoSolution {
        alpha,
        bias,
        dual_objective,
        iterations,
    })
}

fn in_up(alpha: f64, y: f64, c: f64) -> bool {
    (y > 0.0 && alpha < c) || (y < 0.0 && alpha > 0.0)
}

fn in_low(alpha: f64, y: f64, c: f64) -> bool {
    (y > 0.0 && alpha > 0.0) || (y < 0.0 && alpha < c)
}

/// Maximal violating pair `(i, j)` and the gap `m(a) - M(a)`.
fn select_pair(alpha: &[f64], grad: &[f64], y: &[f64], c: f64) -> Option<(usize, usize, f64)> {
    let mut best_up: Option<(usize, f64)> = None;
    let mut best_low: Option<(usize, f64)> = None;
    for t in 0..alpha.len() {
        let score = -y[t] * grad[t];
        if in_up(alpha[t], y[t], c) && best_up.is_none_or(|(_, s)| score > s) {
            best_up = Some((t, score));
        }
        if in_low(alpha[t], y[t], c) && best_low.is_none_or(|(_, s)| score < s) {
            best_low = Some((t, score));
        }
    }
    let (i, m) = best_up?;
    let (j, big_m) = best_low?;
    Some((i, j, m - big_m))
}

/// Bias from free multipliers, or the midpoint of the feasible interval when
/// every multiplier sits at a bound.
fn compute_bias(alpha: &[f64], grad: &[f64], y: &[f64], c: f64) -> f64 {
    let mut free_sum = 0.0;
    let mut free_count = 0usize;
    let mut lower = f64::NEG_INFINITY;
    let mut upper = f64::INFINITY;
    for t in 0..alpha.len() {
        let score = -y[t] * grad[t];
        if alpha[t] > 0.0 && alpha[t] < c {
            free_sum += score;
            free_count += 1;
        } else {
            if in_up(alpha[t], y[t], c) {
                lower = lower.max(score);
            }
            if in_low(alpha[t], y[t], c) {
                upper = upper.min(score);
            }
        }
    }
    if free_count > 0 {
        free_sum / free_count as f64
    } else if lower.is_finite() && upper.is_finite() {
        0.5 * (lower + upper)
    } else if lower.is_finite() {
        lower
    } else if upper.is_finite() {
        upper
    } else {
        0.0
    }
}
