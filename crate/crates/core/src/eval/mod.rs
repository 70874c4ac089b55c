//! Splits, metrics, baselines and the shuffled-label control.
//!
//! Seeded steps draw from fixed PCG streams of the experiment seed:
//! [`HOLDOUT_STREAM`] for the train/test split, [`KFOLD_STREAM`] for the
//! fold plan, and `PERMUTATION_STREAM_BASE + r` for the `r`-th shuffle.

mod experiment;
mod permutation;
mod report;

pub use experiment::{run_experiment, ExperimentOutcome, ModelOutcome};
pub use permutation::{permutation_control, PermutationOutcome};
pub use report::{
    read_accuracy_summary, read_confusion_csv, write_accuracy_summary, write_confusion_csv, Baselines, BestModel,
    EvaluationReport, ModelReport, SummaryRow, REPORT_FORMAT_VERSION,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::Pcg32;

pub const HOLDOUT_STREAM: u64 = 1;
pub const KFOLD_STREAM: u64 = 2;
pub const PERMUTATION_STREAM_BASE: u64 = 1000;

/// Fold index of every sample.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitPlan {
    k: usize,
    folds: Vec<usize>,
}

impl SplitPlan {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn folds(&self) -> &[usize] {
        &self.folds
    }

    pub fn fold_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &f in &self.folds {
            sizes[f] += 1;
        }
        sizes
    }

    /// Ascending indices held out in `fold`.
    pub fn test_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.folds.len()).filter(|&i| self.folds[i] == fold).collect()
    }

    /// Ascending indices used for training when `fold` is held out.
    pub fn train_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.folds.len()).filter(|&i| self.folds[i] != fold).collect()
    }
}

// Member lists per class, each in ascending index order.
fn group_by_class(labels: &[usize]) -> Vec<Vec<usize>> {
    let classes = labels.iter().max().map_or(0, |&m| m + 1);
    let mut groups = vec![Vec::new(); classes];
    for (i, &y) in labels.iter().enumerate() {
        groups[y].push(i);
    }
    groups
}

/// Stratified k-fold plan. Classes are visited in ascending order; each
/// class's members are shuffled and dealt round-robin, the dealing pointer
/// carrying over from one class to the next and starting at a seeded fold.
/// Fold sizes therefore differ by at most one.
pub fn kfold_split(labels: &[usize], k: usize, seed: u64) -> Result<SplitPlan> {
    if k < 2 || k > labels.len() {
        return Err(Error::InvalidFolds {
            folds: k,
            samples: labels.len(),
        });
    }
    let mut rng = Pcg32::new(seed, KFOLD_STREAM);
    let mut pointer = rng.index(k);
    let mut folds = vec![0; labels.len()];
    for mut members in group_by_class(labels) {
        rng.shuffle(&mut members);
        for m in members {
            folds[m] = pointer;
            pointer = (pointer + 1) % k;
        }
    }
    Ok(SplitPlan { k, folds })
}

/// Stratified train/test split, both index lists ascending.
///
/// Members of each class are shuffled and the classes concatenated in
/// ascending order; position `q` of that sequence goes to the test side
/// when `floor((q + 1) f) > floor(q f)`. Exactly `floor(n f)` samples are
/// held out and every class contributes its share up to rounding.
pub fn holdout_split(labels: &[usize], test_fraction: f64, seed: u64) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(Error::invalid("test_fraction", format!("must be within (0, 1), got {test_fraction}")));
    }
    let mut rng = Pcg32::new(seed, HOLDOUT_STREAM);
    let mut order = Vec::with_capacity(labels.len());
    for mut members in group_by_class(labels) {
        rng.shuffle(&mut members);
        order.extend(members);
    }
    let (mut train, mut test) = (Vec::new(), Vec::new());
    for (q, &i) in order.iter().enumerate() {
        let held = ((q + 1) as f64 * test_fraction).floor() > (q as f64 * test_fraction).floor();
        if held {
            test.push(i);
        } else {
            train.push(i);
        }
    }
    if train.is_empty() {
        return Err(Error::Empty("training split"));
    }
    if test.is_empty() {
        return Err(Error::Empty("test split"));
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok((train, test))
}

/// Fraction of exact matches.
pub fn accuracy(predictions: &[usize], truths: &[usize]) -> Result<f64> {
    if predictions.len() != truths.len() {
        return Err(Error::LengthMismatch {
            left: predictions.len(),
            right: truths.len(),
        });
    }
    if truths.is_empty() {
        return Err(Error::Empty("prediction list"));
    }
    let hits = predictions.iter().zip(truths).filter(|(p, t)| p == t).count();
    Ok(hits as f64 / truths.len() as f64)
}

/// Rows are true classes, columns predicted classes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub counts: Vec<Vec<u64>>,
    pub support: Vec<u64>,
}

impl ConfusionMatrix {
    pub fn classes(&self) -> usize {
        self.support.len()
    }

    pub fn total(&self) -> u64 {
        self.support.iter().sum()
    }

    pub fn trace(&self) -> u64 {
        (0..self.classes()).map(|i| self.counts[i][i]).sum()
    }

    /// Trace over total; 0 for an empty matrix.
    pub fn diagonal_fraction(&self) -> f64 {
        match self.total() {
            0 => 0.0,
            t => self.trace() as f64 / t as f64,
        }
    }
}

pub fn confusion(predictions: &[usize], truths: &[usize], classes: usize) -> Result<ConfusionMatrix> {
    if predictions.len() != truths.len() {
        return Err(Error::LengthMismatch {
            left: predictions.len(),
            right: truths.len(),
        });
    }
    let mut counts = vec![vec![0u64; classes]; classes];
    let mut support = vec![0u64; classes];
    for (&p, &t) in predictions.iter().zip(truths) {
        if let Some(&class) = [p, t].iter().find(|&&c| c >= classes) {
            return Err(Error::ClassOutOfRange { class, classes });
        }
        counts[t][p] += 1;
        support[t] += 1;
    }
    Ok(ConfusionMatrix { counts, support })
}

/// Expected accuracy of a uniform guesser over `classes` classes.
pub fn uniform_random_baseline(classes: usize) -> f64 {
    1.0 / classes as f64
}

/// Frequency of the most common class.
pub fn majority_baseline(truths: &[usize]) -> Result<f64> {
    if truths.is_empty() {
        return Err(Error::Empty("label list"));
    }
    let best = group_by_class(truths).iter().map(Vec::len).max().unwrap_or(0);
    Ok(best as f64 / truths.len() as f64)
}

/// Accuracy of the optimal sign-conditional predictor under the label
/// mixture: `p / 10 + (1 - p) / 100`.
pub fn bayes_accuracy(signal_probability: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&signal_probability) {
        return Err(Error::InvalidProbability(signal_probability));
    }
    let p = signal_probability;
    Ok(p / crate::lexicon::TRAITS_PER_SIGN as f64 + (1.0 - p) / crate::lexicon::TRAIT_COUNT as f64)
}

/// Seeded Fisher-Yates permutation of the labels.
pub fn shuffle_labels(labels: &[usize], rng: &mut Pcg32) -> Vec<usize> {
    let mut out = labels.to_vec();
    rng.shuffle(&mut out);
    out
}

/// `(1 + #{shuffled >= real}) / (R + 1)`.
pub fn permutation_p_value(real: f64, shuffled: &[f64]) -> f64 {
    let at_least = shuffled.iter().filter(|&&s| s >= real).count();
    (1 + at_least) as f64 / (shuffled.len() + 1) as f64
}

pub fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    values.iter().sum::<f64>() / values.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn kfold_balanced_examples() {
        let plan = kfold_split(&[0, 1, 2, 3, 4, 5, 6, 7, 8, 9], 5, 1).unwrap();
        assert_eq!(plan.fold_sizes(), vec![2; 5]);
        let plan = kfold_split(&[7; 100], 5, 1).unwrap();
        assert_eq!(plan.fold_sizes(), vec![20; 5]);
        assert_eq!(plan, kfold_split(&[7; 100], 5, 1).unwrap());
    }

    #[test]
    fn kfold_rejects_bad_k() {
        assert!(kfold_split(&[0, 1], 3, 0).is_err());
        assert!(kfold_split(&[0, 1], 1, 0).is_err());
    }

    #[test]
    fn kfold_train_and_test_partition() {
        let labels: Vec<usize> = (0..23).map(|i| i % 4).collect();
        let plan = kfold_split(&labels, 4, 9).unwrap();
        for f in 0..4 {
            let mut all = plan.train_indices(f);
            all.extend(plan.test_indices(f));
            all.sort_unstable();
            assert_eq!(all, (0..23).collect::<Vec<_>>());
        }
    }

    #[test]
    fn holdout_is_stratified_and_exact() {
        let labels: Vec<usize> = (0..5000).map(|i| i % 100).collect();
        let (train, test) = holdout_split(&labels, 0.2, 3).unwrap();
        assert_eq!(test.len(), 1000);
        assert_eq!(train.len(), 4000);
        let mut per_class = vec![0; 100];
        for &i in &test {
            per_class[labels[i]] += 1;
        }
        assert!(per_class.iter().all(|&c| c == 10));
    }

    #[test]
    fn accuracy_examples() {
        assert_eq!(accuracy(&[1, 2], &[1, 2]).unwrap(), 1.0);
        assert_eq!(accuracy(&[1, 2], &[3, 4]).unwrap(), 0.0);
        assert_eq!(accuracy(&[0, 1, 2], &[0, 1, 3]).unwrap(), 2.0 / 3.0);
        assert!(accuracy(&[0], &[0, 1]).is_err());
        assert!(accuracy(&[], &[]).is_err());
    }

    #[test]
    fn confusion_perfect_is_diagonal() {
        let c = confusion(&[0, 1, 2, 2], &[0, 1, 2, 2], 3).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(c.counts[i][j] > 0, i == j);
            }
        }
        assert!(confusion(&[3], &[0], 3).is_err());
    }

    #[test]
    fn baselines() {
        assert_eq!(uniform_random_baseline(100), 0.01);
        assert_eq!(uniform_random_baseline(1), 1.0);
        assert_eq!(uniform_random_baseline(2), 0.5);
        assert_eq!(majority_baseline(&[4, 4, 4]).unwrap(), 1.0);
        assert_eq!(majority_baseline(&(0..100).collect::<Vec<_>>()).unwrap(), 0.01);
        assert_eq!(majority_baseline(&[0, 0, 1]).unwrap(), 2.0 / 3.0);
        assert!(majority_baseline(&[]).is_err());
    }

    #[test]
    fn bayes_examples() {
        assert!((bayes_accuracy(0.0).unwrap() - 0.01).abs() < 1e-15);
        assert!((bayes_accuracy(1.0).unwrap() - 0.10).abs() < 1e-15);
        assert!((bayes_accuracy(0.1).unwrap() - 0.019).abs() < 1e-15);
        assert!(bayes_accuracy(1.5).is_err());
    }

    #[test]
    fn p_value_bounds() {
        assert_eq!(permutation_p_value(0.0, &[0.1, 0.2, 0.3]), 1.0);
        assert_eq!(permutation_p_value(0.9, &[0.1; 19]), 0.05);
        assert_eq!(permutation_p_value(0.1, &[0.1, 0.0, 0.0]), 0.5);
    }

    #[test]
    fn shuffle_single_and_seeded() {
        assert_eq!(shuffle_labels(&[5], &mut Pcg32::new(1, 1)), vec![5]);
        let v: Vec<usize> = (0..50).collect();
        assert_eq!(shuffle_labels(&v, &mut Pcg32::new(1, 1)), shuffle_labels(&v, &mut Pcg32::new(1, 1)));
    }

    proptest! {
        #[test]
        fn kfold_sizes_differ_by_at_most_one(
            labels in proptest::collection::vec(0usize..7, 2..200),
            k in 2usize..10,
            seed in any::<u64>(),
        ) {
            prop_assume!(k <= labels.len());
            let plan = kfold_split(&labels, k, seed).unwrap();
            let sizes = plan.fold_sizes();
            prop_assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
            prop_assert_eq!(sizes.iter().sum::<usize>(), labels.len());
            // each class is spread evenly as well
            for c in 0..7 {
                let mut per_fold = vec![0usize; k];
                for (i, &y) in labels.iter().enumerate() {
                    if y == c { per_fold[plan.folds()[i]] += 1; }
                }
                prop_assert!(per_fold.iter().max().unwrap() - per_fold.iter().min().unwrap() <= 1);
            }
        }

        #[test]
        fn shuffle_preserves_multiset(labels in proptest::collection::vec(0usize..100, 1..300), seed in any::<u64>()) {
            let mut out = shuffle_labels(&labels, &mut Pcg32::new(seed, 0));
            let mut sorted = labels.clone();
            out.sort_unstable();
            sorted.sort_unstable();
            prop_assert_eq!(out, sorted);
        }

        #[test]
        fn confusion_identities(
            pairs in proptest::collection::vec((0usize..6, 0usize..6), 1..200),
        ) {
            let (pred, truth): (Vec<usize>, Vec<usize>) = pairs.into_iter().unzip();
            let c = confusion(&pred, &truth, 6).unwrap();
            let acc = accuracy(&pred, &truth).unwrap();
            prop_assert_eq!(c.diagonal_fraction(), c.trace() as f64 / truth.len() as f64);
            prop_assert!((c.diagonal_fraction() - acc).abs() == 0.0);
            for (row, &s) in c.counts.iter().zip(&c.support) {
                prop_assert_eq!(row.iter().sum::<u64>(), s);
            }
            prop_assert_eq!(c.total(), truth.len() as u64);
        }
    }
}
