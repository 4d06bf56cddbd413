use serde::{Deserialize, Serialize};

use crate::error::{Result, XglError};
use crate::synthdata::Label;

/// Confusion counts with red as the positive class.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
    pub tn: usize,
}

impl ConfusionCounts {
    pub fn from_labels(preds: &[Label], truth: &[Label]) -> Result<Self> {
        if preds.len() != truth.len() {
            return Err(XglError::LengthMismatch {
                left: preds.len(),
                right: truth.len(),
            });
        }
        let mut counts = Self::default();
        for (p, t) in preds.iter().zip(truth) {
            match (p.is_red(), t.is_red()) {
                (true, true) => counts.tp += 1,
                (true, false) => counts.fp += 1,
                (false, true) => counts.fn_ += 1,
                (false, false) => counts.tn += 1,
            }
        }
        Ok(counts)
    }

    pub fn total(&self) -> usize {
        self.tp + self.fp + self.fn_ + self.tn
    }

    pub fn precision(&self) -> f64 {
        ratio(self.tp, self.tp + self.fp)
    }

    pub fn recall(&self) -> f64 {
        ratio(self.tp, self.tp + self.fn_)
    }

    /// F1 of the red class; 0 when precision and recall are both 0.
    pub fn f1(&self) -> f64 {
        let p = self.precision();
        let r = self.recall();
        if p + r == 0.0 {
            0.0
        } else {
            2.0 * p * r / (p + r)
        }
    }
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

pub fn f1_score(preds: &[Label], truth: &[Label]) -> Result<f64> {
    if preds.is_empty() {
        return Err(XglError::Empty("prediction list"));
    }
    Ok(ConfusionCounts::from_labels(preds, truth)?.f1())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use Label::{Blue, Red};

    #[test]
    fn perfect_prediction() {
        let t = [Red, Blue, Blue, Red];
        assert_eq!(f1_score(&t, &t).unwrap(), 1.0);
    }

    #[test]
    fn all_blue_predictions() {
        assert_eq!(f1_score(&[Blue, Blue, Blue], &[Red, Blue, Blue]).unwrap(), 0.0);
    }

    #[test]
    fn hand_computed_counts() {
        let c = ConfusionCounts { tp: 8, fp: 2, fn_: 4, tn: 0 };
        // precision 0.8, recall 2/3 -> 2*0.8*(2/3)/(0.8+2/3) = 16/22
        assert!((c.f1() - 0.7273).abs() < 1e-4);
        assert!((c.f1() - 16.0 / 22.0).abs() < 1e-12);
    }

    #[test]
    fn errors() {
        assert!(matches!(f1_score(&[Red], &[Red, Blue]), Err(XglError::LengthMismatch { .. })));
        assert!(matches!(f1_score(&[], &[]), Err(XglError::Empty(_))));
    }

    fn label() -> impl Strategy<Value = Label> {
        prop_oneof![Just(Red), Just(Blue)]
    }

    proptest! {
        #[test]
        fn joint_shuffle_invariance(
            pairs in prop::collection::vec((label(), label()), 1..60),
            seed in any::<u64>(),
        ) {
            use rand::{seq::SliceRandom, SeedableRng};
            let (p, t): (Vec<_>, Vec<_>) = pairs.iter().copied().unzip();
            let mut shuffled = pairs.clone();
            shuffled.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
            let (ps, ts): (Vec<_>, Vec<_>) = shuffled.into_iter().unzip();
            let a = f1_score(&p, &t).unwrap();
            let b = f1_score(&ps, &ts).unwrap();
            prop_assert_eq!(a, b);
            prop_assert!((0.0..=1.0).contains(&a));
            let c = ConfusionCounts::from_labels(&p, &t).unwrap();
            prop_assert_eq!(c.total(), p.len());
        }
    }
}
