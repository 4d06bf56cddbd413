//! Effect of the simulated supervisor's temperature on XGL.

use xgl::engine::{run_experiment, ExperimentConfig};
use xgl::strategies::{StrategyKind, Theta};
use xgl::synthdata::generate_synthetic;

fn main() -> xgl::Result<()> {
    let base = ExperimentConfig {
        strategy: StrategyKind::Xgl,
        ..ExperimentConfig::default()
    };
    let dataset = generate_synthetic(&base.synthetic_config())?;
    println!("{:<8} {:>8} {:>8} {:>8} {:>8}", "theta", "F1@50", "F1@100", "final", "switch");
    for theta in [Theta::Argmax, Theta::Value(1.0), Theta::Value(0.1), Theta::Value(0.0)] {
        let r = run_experiment(&ExperimentConfig { theta, ..base.clone() }, &dataset)?;
        let f = &r.summary.mean_f1;
        println!(
            "{:<8} {:>8.3} {:>8.3} {:>8.3} {:>8.1}",
            theta.to_string(),
            f[50],
            f[100],
            f[f.len() - 1],
            r.summary.mean_switch_iteration.unwrap_or(f64::NAN)
        );
    }
    Ok(())
}
