//! RBF-kernel soft-margin SVM and classification metrics.

mod metrics;
pub mod smo;

pub use metrics::{f1_score, ConfusionCounts};
pub use smo::{SmoSettings, SmoSolution};

use serde::{Deserialize, Serialize};

use crate::error::{Result, XglError};
use crate::synthdata::{Label, Point2};

/// Multipliers below this are treated as zero when extracting support vectors.
const SUPPORT_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SvmHyperParams {
    pub gamma: f64,
    pub c: f64,
}

impl Default for SvmHyperParams {
    fn default() -> Self {
        Self {
            gamma: 100.0,
            c: 100.0,
        }
    }
}

impl SvmHyperParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(XglError::InvalidConfig(format!("gamma must be positive, got {}", self.gamma)));
        }
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(XglError::InvalidConfig(format!("C must be positive, got {}", self.c)));
        }
        Ok(())
    }
}

pub fn rbf_kernel(gamma: f64, a: &Point2, b: &Point2) -> f64 {
    (-gamma * a.sq_dist(b)).exp()
}

/// A fitted classifier. `coeffs[i]` holds `alpha_i * y_i` for `support_points[i]`.
/// A model without support points is the constant classifier `sign(bias)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvmModel {
    pub support_points: Vec<Point2>,
    pub coeffs: Vec<f64>,
    pub bias: f64,
    pub params: SvmHyperParams,
    /// Dual objective reached by the solver; zero for constant models.
    pub dual_objective: f64,
}

impl SvmModel {
    /// Constant classifier predicting `label` everywhere.
    pub fn constant(label: Label, params: SvmHyperParams) -> Self {
        Self {
            support_points: Vec::new(),
            coeffs: Vec::new(),
            bias: label.sign(),
            params,
            dual_objective: 0.0,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn decision_value(&self, x: &Point2) -> f64 {
        self.support_points
            .iter()
            .zip(&self.coeffs)
            .map(|(sv, c)| c * rbf_kernel(self.params.gamma, sv, x))
            .sum::<f64>()
            + self.bias
    }

    pub fn predict(&self, x: &Point2) -> Label {
        label_for(self.decision_value(x))
    }

    pub fn predict_many<'a>(&self, xs: impl IntoIterator<Item = &'a Point2>) -> Vec<Label> {
        xs.into_iter().map(|x| self.predict(x)).collect()
    }
}

/// Sign rule with ties going to red, the positive class.
pub fn label_for(decision: f64) -> Label {
    if decision >= 0.0 {
        Label::Red
    } else {
        Label::Blue
    }
}

pub fn decision_value(model: &SvmModel, x: &Point2) -> f64 {
    model.decision_value(x)
}

pub fn predict(model: &SvmModel, x: &Point2) -> Label {
    model.predict(x)
}

/// Fits the SVM with default solver settings.
pub fn svm_fit(examples: &[(Point2, Label)], params: SvmHyperParams) -> Result<SvmModel> {
    svm_fit_with(examples, params, &SmoSettings::default())
}

pub fn svm_fit_with(
    examples: &[(Point2, Label)],
    params: SvmHyperParams,
    settings: &SmoSettings,
) -> Result<SvmModel> {
    Ok(svm_fit_detailed(examples, params, settings)?.model)
}

/// A fitted model together with the full multiplier vector, aligned with the
/// training examples.
#[derive(Debug, Clone, PartialEq)]
pub struct FitOutcome {
    pub model: SvmModel,
    pub alpha: Vec<f64>,
    pub iterations: usize,
}

pub fn svm_fit_detailed(
    examples: &[(Point2, Label)],
    params: SvmHyperParams,
    settings: &SmoSettings,
) -> Result<FitOutcome> {
    params.validate()?;
    let first = examples.first().ok_or(XglError::Empty("training set"))?.1;
    if examples.iter().all(|(_, l)| *l == first) {
        return Ok(FitOutcome {
            model: SvmModel::constant(first, params),
            alpha: vec![0.0; examples.len()],
            iterations: 0,
        });
    }

    let n = examples.len();
    let y: Vec<f64> = examples.iter().map(|(_, l)| l.sign()).collect();
    let mut kernel = vec![0.0; n * n];
    for i in 0..n {
        kernel[i * n + i] = 1.0;
        for j in 0..i {
            let k = rbf_kernel(params.gamma, &examples[i].0, &examples[j].0);
            kernel[i * n + j] = k;
            kernel[j * n + i] = k;
        }
    }

    let solution = smo::solve(&kernel, &y, params.c, settings)?;
    let (support_points, coeffs) = solution
        .alpha
        .iter()
        .zip(examples)
        .zip(&y)
        .filter(|((a, _), _)| **a > SUPPORT_EPS)
        .map(|((a, (p, _)), yi)| (*p, a * yi))
        .unzip();

    Ok(FitOutcome {
        model: SvmModel {
            support_points,
            coeffs,
            bias: solution.bias,
            params,
            dual_objective: solution.dual_objective,
        },
        alpha: solution.alpha,
        iterations: solution.iterations,
    })
}

/// Largest KKT residual on the functional margin `y f(x)` over the training
/// set, given the multipliers aligned with `examples`:
/// `a = 0 => yf >= 1`, `0 < a < C => yf = 1`, `a = C => yf <= 1`.
pub fn kkt_residual(model: &SvmModel, examples: &[(Point2, Label)], alpha: &[f64]) -> f64 {
    if model.is_constant() {
        return 0.0;
    }
    let c = model.params.c;
    let bound_tol = 1e-9 * c.max(1.0);
    examples
        .iter()
        .zip(alpha)
        .map(|((p, l), &a)| {
            let margin = l.sign() * model.decision_value(p);
            if a <= bound_tol {
                (1.0 - margin).max(0.0)
            } else if a >= c - bound_tol {
                (margin - 1.0).max(0.0)
            } else {
                (margin - 1.0).abs()
            }
        })
        .fold(0.0, f64::max)
}
