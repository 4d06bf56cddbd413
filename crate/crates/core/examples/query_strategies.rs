//! One query from each strategy against the same initial model.

use std::collections::BTreeSet;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use xgl::explainer::build_explanation;
use xgl::learner::{svm_fit, SvmHyperParams};
use xgl::strategies::{
    cluster_choice_distribution, guided_query, random_query, uncertainty_query, xgl_simulated_query, SimulatedUser,
    Theta,
};
use xgl::synthdata::{generate_synthetic, initial_training_set, stratified_kfold, SyntheticConfig};

fn main() -> xgl::Result<()> {
    let ds = generate_synthetic(&SyntheticConfig::default())?;
    let fold = stratified_kfold(&ds, 10, 0)?.remove(0);
    let labeled: BTreeSet<usize> = initial_training_set(&fold, &ds, 0)?.into_iter().collect();
    let unlabeled: Vec<usize> = fold.train_indices.iter().copied().filter(|i| !labeled.contains(i)).collect();
    let pairs: Vec<_> = labeled.iter().map(|&i| (ds.point(i), ds.label(i))).collect();
    let model = svm_fit(&pairs, SvmHyperParams::default())?;
    let mut rng = ChaCha8Rng::seed_from_u64(0);

    let show = |name: &str, i: usize| {
        let p = ds.point(i);
        println!(
            "{name:<12} -> #{i} at ({:.3}, {:.3}), truth {}, predicted {}",
            p.x1,
            p.x2,
            ds.label(i),
            model.predict(&p)
        );
    };
    show("uncertainty", uncertainty_query(&model, &unlabeled, &ds)?.selected_index);
    show("guided", guided_query(&unlabeled, &ds, None, &mut rng)?.selected_index);
    show("random", random_query(&unlabeled, &mut rng)?.selected_index);

    let explanation = build_explanation(&ds, &fold.train_indices, &labeled, &model, 10, 0.5, 0, 0)?;
    for theta in [Theta::Argmax, Theta::Value(1.0), Theta::Value(0.0)] {
        let q = xgl_simulated_query(&explanation, &model, &ds, &unlabeled, &SimulatedUser::new(theta), &mut rng)?;
        show(&format!("xgl {theta}"), q.selected_index);
    }

    println!("choice probabilities for m=[3,1]:");
    for theta in [0.0, 0.1, 1.0] {
        println!("  theta={theta}: {:?}", cluster_choice_distribution(&[3, 1], Theta::Value(theta)));
    }
    Ok(())
}
