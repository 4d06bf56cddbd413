//! Build the clustering explanation of a partially trained model and print
//! its prototypes and descriptions.

use std::collections::BTreeSet;

use xgl::explainer::{build_explanation, surrogate_fidelity, DEFAULT_LABEL_WEIGHT};
use xgl::learner::{svm_fit, SvmHyperParams};
use xgl::synthdata::{generate_synthetic, initial_training_set, stratified_kfold, SyntheticConfig};

fn main() -> xgl::Result<()> {
    let dataset = generate_synthetic(&SyntheticConfig::default())?;
    let fold = stratified_kfold(&dataset, 10, 0)?.remove(0);

    // The initial five plus every 20th pool point.
    let mut labeled: BTreeSet<usize> = initial_training_set(&fold, &dataset, 0)?.into_iter().collect();
    labeled.extend(fold.train_indices.iter().step_by(20));
    let pairs: Vec<_> = labeled.iter().map(|&i| (dataset.point(i), dataset.label(i))).collect();
    let model = svm_fit(&pairs, SvmHyperParams::default())?;

    let explanation = build_explanation(&dataset, &fold.train_indices, &labeled, &model, 10, DEFAULT_LABEL_WEIGHT, 0, 0)?;
    print!("{}", explanation.render_text());
    println!("fidelity to the model: {:.3}", surrogate_fidelity(&explanation, &model, 0, &dataset)?);

    let misclassified: Vec<usize> = explanation
        .clusters
        .iter()
        .map(|c| {
            c.member_indices
                .iter()
                .filter(|&&i| model.predict(&dataset.point(i)) != dataset.label(i))
                .count()
        })
        .collect();
    println!("misclassified per cluster: {misclassified:?}");
    Ok(())
}
