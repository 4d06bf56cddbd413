use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Result, XglError};
use crate::explainer::DEFAULT_LABEL_WEIGHT;
use crate::learner::SvmHyperParams;
use crate::strategies::{MisclassifiedScope, StrategyKind, Theta};
use crate::synthdata::SyntheticConfig;

/// Full run specification. Serialized as a flat JSON object; missing keys
/// take their defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub strategy: StrategyKind,
    pub theta: Theta,
    pub budget: usize,
    pub folds: usize,
    pub k_clusters: usize,
    pub gamma: f64,
    pub c: f64,
    /// Weight of the label feature in the explanation's clustering.
    pub w: f64,
    pub seed: u64,
    pub snapshot_iterations: Vec<usize>,
    pub misclassified_scope: MisclassifiedScope,
    pub raster_resolution: usize,
    /// Fold held out for evaluation in live sessions.
    pub test_fold: usize,
    pub n_blue: usize,
    pub n_red: usize,
    pub grid_side: usize,
    pub cluster_std: f64,
    pub exclusion_radius: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let svm = SvmHyperParams::default();
        let data = SyntheticConfig::default();
        Self {
            strategy: StrategyKind::Xgl,
            theta: Theta::Argmax,
            budget: 150,
            folds: 10,
            k_clusters: 10,
            gamma: svm.gamma,
            c: svm.c,
            w: DEFAULT_LABEL_WEIGHT,
            seed: 0,
            snapshot_iterations: vec![10, 70, 90, 140],
            misclassified_scope: MisclassifiedScope::AllPool,
            raster_resolution: 100,
            test_fold: 0,
            n_blue: data.n_blue,
            n_red: data.n_red,
            grid_side: data.grid_side,
            cluster_std: data.cluster_std,
            exclusion_radius: data.exclusion_radius,
        }
    }
}

impl ExperimentConfig {
    pub fn svm_params(&self) -> SvmHyperParams {
        SvmHyperParams {
            gamma: self.gamma,
            c: self.c,
        }
    }

    /// Dataset generator settings; the dataset shares the run seed.
    pub fn synthetic_config(&self) -> SyntheticConfig {
        SyntheticConfig {
            n_blue: self.n_blue,
            n_red: self.n_red,
            grid_side: self.grid_side,
            cluster_std: self.cluster_std,
            exclusion_radius: self.exclusion_radius,
            seed: self.seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.svm_params().validate()?;
        self.synthetic_config().validate()?;
        if self.folds < 2 {
            return Err(XglError::InvalidConfig(format!("folds must be >= 2, got {}", self.folds)));
        }
        if self.k_clusters == 0 {
            return Err(XglError::InvalidConfig("k_clusters must be positive".into()));
        }
        if !(self.w >= 0.0 && self.w.is_finite()) {
            return Err(XglError::InvalidConfig(format!("w must be non-negative, got {}", self.w)));
        }
        if let Some(&t) = self.snapshot_iterations.iter().find(|&&t| t > self.budget) {
            return Err(XglError::InvalidConfig(format!(
                "snapshot iteration {t} exceeds budget {}",
                self.budget
            )));
        }
        if self.raster_resolution < 2 {
            return Err(XglError::InvalidConfig("raster_resolution must be >= 2".into()));
        }
        if self.test_fold >= self.folds {
            return Err(XglError::InvalidConfig(format!(
                "test_fold {} out of range for {} folds",
                self.test_fold, self.folds
            )));
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let config: Self = serde_json::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_match_reference_setup() {
        let c = ExperimentConfig::default();
        assert_eq!((c.gamma, c.c), (100.0, 100.0));
        assert_eq!((c.k_clusters, c.budget, c.folds), (10, 150, 10));
        assert_eq!(c.snapshot_iterations, vec![10, 70, 90, 140]);
        assert_eq!(c.theta, Theta::Argmax);
        c.validate().unwrap();
    }

    #[test]
    fn partial_json_fills_defaults() {
        let c = ExperimentConfig::from_json(r#"{"strategy": "al", "budget": 20, "snapshot_iterations": [5], "theta": 0.1}"#)
            .unwrap();
        assert_eq!(c.strategy, StrategyKind::ActiveUncertainty);
        assert_eq!(c.budget, 20);
        assert_eq!(c.theta, Theta::Value(0.1));
        assert_eq!(c.k_clusters, 10);
        let back = ExperimentConfig::from_json(&c.to_json()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn rejects_unknown_keys_and_bad_values() {
        assert!(ExperimentConfig::from_json(r#"{"bogus": 1}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"strategy": "nope"}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"folds": 1}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"budget": 5}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"gamma": 0}"#).is_err());
    }
}
