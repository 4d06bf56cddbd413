//! Generate the benchmark dataset, split it into folds and draw an initial
//! training set.
//!
//! ```bash
//! cargo run --example generate_dataset -- 7 data.csv
//! ```

use xgl::synthdata::{generate_synthetic, initial_training_set, stratified_kfold, SyntheticConfig};

fn main() -> xgl::Result<()> {
    let mut args = std::env::args().skip(1);
    let seed: u64 = args.next().map(|s| s.parse().expect("seed must be an integer")).unwrap_or(0);
    let out = args.next();

    let config = SyntheticConfig { seed, ..SyntheticConfig::default() };
    let dataset = generate_synthetic(&config)?;
    let counts = dataset.counts();
    println!("{} points: {} red in 25 clusters, {} blue", dataset.len(), counts.red, counts.blue);

    let folds = stratified_kfold(&dataset, 10, seed)?;
    for fold in folds.iter().take(3) {
        let red = fold.test_indices.iter().filter(|&&i| dataset.label(i).is_red()).count();
        let initial = initial_training_set(fold, &dataset, seed)?;
        println!(
            "fold {}: {} test points ({red} red), initial set {:?}",
            fold.fold_id,
            fold.test_indices.len(),
            initial.iter().map(|&i| (i, dataset.label(i).as_str())).collect::<Vec<_>>()
        );
    }

    if let Some(path) = out {
        dataset.save(&path)?;
        println!("wrote {path}");
    }
    Ok(())
}
