use rayon::prelude::*;

use crate::error::Result;
use crate::eval::{accuracy, permutation_p_value, shuffle_labels, PERMUTATION_STREAM_BASE};
use crate::features::FeatureMatrix;
use crate::models::{predict, train, TrainConfig};
use crate::rng::Pcg32;

#[derive(Clone, Debug, PartialEq)]
pub struct PermutationOutcome {
    pub shuffled_accuracies: Vec<f64>,
    pub p_value: f64,
}

/// Shuffled-label control for one model.
///
/// For repetition `r` the concatenated train and test labels are permuted
/// with stream `PERMUTATION_STREAM_BASE + r` of `seed`, the model is
/// retrained on the permuted training labels and scored on the permuted
/// test labels. The split itself and the features are left as they are.
/// Repetitions run in parallel; results are collected in index order.
pub fn permutation_control(
    train_x: &FeatureMatrix,
    test_x: &FeatureMatrix,
    config: &TrainConfig,
    real_accuracy: f64,
    repetitions: usize,
    seed: u64,
) -> Result<PermutationOutcome> {
    let n_train = train_x.rows();
    let labels: Vec<usize> = train_x.labels().iter().chain(test_x.labels()).copied().collect();
    let shuffled_accuracies = (0..repetitions)
        .into_par_iter()
        .map(|r| {
            let mut rng = Pcg32::new(seed, PERMUTATION_STREAM_BASE + r as u64);
            let permuted = shuffle_labels(&labels, &mut rng);
            let (train_y, test_y) = permuted.split_at(n_train);
            let model = train(&train_x.with_labels(train_y.to_vec())?, config)?;
            accuracy(&predict(&model, test_x)?, test_y)
        })
        .collect::<Result<Vec<f64>>>()?;
    let p_value = permutation_p_value(real_accuracy, &shuffled_accuracies);
    Ok(PermutationOutcome {
        shuffled_accuracies,
        p_value,
    })
}
