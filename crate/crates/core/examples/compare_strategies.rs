//! Cross-validated learning curves for every strategy, written as CSV and
//! SVG. Takes a few minutes with the default budget.
//!
//! ```bash
//! cargo run --release --example compare_strategies -- out/
//! ```

use std::path::PathBuf;

use xgl::engine::output::emit_outputs;
use xgl::engine::{run_experiment, ExperimentConfig};
use xgl::strategies::StrategyKind;
use xgl::synthdata::generate_synthetic;

fn main() -> xgl::Result<()> {
    let out = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "compare_out".into()));
    let base = ExperimentConfig::default();
    let dataset = generate_synthetic(&base.synthetic_config())?;

    let mut results = Vec::new();
    for strategy in StrategyKind::BATCH {
        let result = run_experiment(&ExperimentConfig { strategy, ..base.clone() }, &dataset)?;
        let s = &result.summary;
        print!("{strategy:<8} F1@100 {:.3}", s.mean_f1[s.mean_f1.len().min(101) - 1]);
        if let Some(t) = s.mean_switch_iteration {
            print!("  switch at {t:.1} (F1 {:.3})", s.f1_at_mean_switch().unwrap_or(f64::NAN));
        }
        println!("  passive {:.3}", s.mean_passive_f1);
        results.push(result);
    }

    for path in emit_outputs(&results, &dataset, &out.join("results.csv"), Some(&out.join("plots")))? {
        println!("wrote {}", path.display());
    }
    Ok(())
}
