//! Explanatory guided learning (XGL) workbench.
//!
//! The crate bundles everything needed to study human-initiated interactive
//! learning on a rare-class 2-D benchmark:
//!
//! - [`synthdata`]: the 25-cluster synthetic dataset, stratified folds and
//!   seeded initial training sets;
//! - [`learner`]: an RBF soft-margin SVM trained with an SMO dual solver,
//!   plus F1 scoring;
//! - [`explainer`]: k-medoids (PAM) global explanations over label-augmented
//!   data, with prototypes, majority labels and textual descriptions;
//! - [`strategies`]: uncertainty sampling, guided learning, random sampling
//!   and the simulated XGL supervisor;
//! - [`engine`]: cross-validated learning-curve experiments, CSV/SVG output;
//! - [`interface`]: the `xgl` command line and the live session service.
//!
//! ```no_run
//! use xgl::engine::{run_experiment, ExperimentConfig};
//! use xgl::strategies::StrategyKind;
//! use xgl::synthdata::generate_synthetic;
//!
//! let config = ExperimentConfig { strategy: StrategyKind::Xgl, ..ExperimentConfig::default() };
//! let dataset = generate_synthetic(&config.synthetic_config()).unwrap();
//! let result = run_experiment(&config, &dataset).unwrap();
//! println!("mean F1 at iteration 100: {:.3}", result.summary.mean_f1[100]);
//! ```

pub mod engine;
pub mod error;
pub mod explainer;
pub mod interface;
pub mod learner;
pub mod strategies;
pub mod synthdata;

pub use error::{Result, XglError};

/// Derives an independent 64-bit seed for `stream` from `base` (splitmix64
/// finalizer over both inputs).
pub fn derive_seed(base: u64, stream: u64) -> u64 {
    fn mix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
    mix(base ^ mix(stream))
}
