//! Fit the RBF SVM on a random sample and score it on the rest.

use rand::seq::IndexedRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use xgl::learner::{f1_score, kkt_residual, svm_fit_detailed, SmoSettings, SvmHyperParams};
use xgl::synthdata::{generate_synthetic, Label, SyntheticConfig};

fn main() -> xgl::Result<()> {
    let dataset = generate_synthetic(&SyntheticConfig::default())?;
    let all: Vec<usize> = (0..dataset.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(1);

    for n in [20, 100, 400] {
        let train: Vec<usize> = all.choose_multiple(&mut rng, n).copied().collect();
        let pairs: Vec<_> = train.iter().map(|&i| (dataset.point(i), dataset.label(i))).collect();
        let fit = svm_fit_detailed(&pairs, SvmHyperParams::default(), &SmoSettings::default())?;

        let rest: Vec<usize> = all.iter().copied().filter(|i| !train.contains(i)).collect();
        let preds: Vec<Label> = rest.iter().map(|&i| fit.model.predict(&dataset.point(i))).collect();
        let truth: Vec<Label> = rest.iter().map(|&i| dataset.label(i)).collect();
        println!(
            "n={n:>3}: {} support vectors, {} SMO steps, KKT residual {:.1e}, held-out F1 {:.3}",
            fit.model.support_points.len(),
            fit.iterations,
            kkt_residual(&fit.model, &pairs, &fit.alpha),
            f1_score(&preds, &truth)?
        );
    }
    Ok(())
}
