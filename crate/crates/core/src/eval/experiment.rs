use log::info;
use rayon::prelude::*;

use crate::config::ExperimentConfig;
use crate::error::Result;
use crate::eval::{
    accuracy, bayes_accuracy, confusion, holdout_split, kfold_split, majority_baseline, mean, permutation_control,
    uniform_random_baseline, Baselines, BestModel, EvaluationReport, ModelReport, REPORT_FORMAT_VERSION,
};
use crate::features::{apply_standardizer, encode, fit_standardizer, FeatureMatrix, StandardizationParams};
use crate::lexicon::{build_default_assignments, build_default_lexicon};
use crate::models::{predict, train, TrainConfig, TrainedModel};
use crate::synthpop::{generate_population, Population};

/// Everything a run produces: the report plus the intermediate artifacts
/// the command line tool can dump on request.
pub struct ExperimentOutcome {
    pub report: EvaluationReport,
    pub population: Population,
    /// Population indices of the training and test rows, ascending.
    pub train_indices: Vec<usize>,
    pub test_indices: Vec<usize>,
    /// Fitted on the full training split.
    pub standardizer: StandardizationParams,
    pub train_features: FeatureMatrix,
    pub test_features: FeatureMatrix,
    pub models: Vec<ModelOutcome>,
}

pub struct ModelOutcome {
    pub model: TrainedModel,
    /// Predicted class of every test row, in `test_indices` order.
    pub test_predictions: Vec<usize>,
}

fn standardize_pair(
    fit_on: &FeatureMatrix,
    other: &FeatureMatrix,
) -> Result<(StandardizationParams, FeatureMatrix, FeatureMatrix)> {
    let all: Vec<usize> = (0..fit_on.rows()).collect();
    let params = fit_standardizer(fit_on, &all)?;
    let a = apply_standardizer(fit_on, &params)?;
    let b = apply_standardizer(other, &params)?;
    Ok((params, a, b))
}

fn cross_validate(train_raw: &FeatureMatrix, folds: &crate::eval::SplitPlan, config: &TrainConfig) -> Result<Vec<f64>> {
    (0..folds.k())
        .into_par_iter()
        .map(|f| {
            let fit = train_raw.select_rows(&folds.train_indices(f));
            let held = train_raw.select_rows(&folds.test_indices(f));
            let (_, fit, held) = standardize_pair(&fit, &held)?;
            let model = train(&fit, config)?;
            accuracy(&predict(&model, &held)?, held.labels())
        })
        .collect()
}

/// Generates the population, splits it, and for every configured model runs
/// k-fold cross-validation on the training split, a final fit scored on the
/// held-out split, and the shuffled-label control.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutcome> {
    config.validate()?;
    let eval = &config.evaluation;
    let lexicon = build_default_lexicon();
    let table = build_default_assignments(&lexicon)?;
    let population = generate_population(&config.generation, &lexicon, &table)?;
    let x = encode(&population)?;

    let (train_indices, test_indices) = holdout_split(x.labels(), eval.test_fraction, eval.experiment_seed)?;
    let train_raw = x.select_rows(&train_indices);
    let test_raw = x.select_rows(&test_indices);
    let (standardizer, train_x, test_x) = standardize_pair(&train_raw, &test_raw)?;
    let folds = kfold_split(train_raw.labels(), eval.k_folds, eval.experiment_seed)?;
    info!(
        "population {} rows: {} train, {} test, {} folds",
        x.rows(),
        train_x.rows(),
        test_x.rows(),
        folds.k()
    );

    let mut entries = Vec::new();
    let mut models = Vec::new();
    for model_config in &config.models {
        let kind = model_config.kind;
        let cv = cross_validate(&train_raw, &folds, model_config)?;
        let model = train(&train_x, model_config)?;
        let test_predictions = predict(&model, &test_x)?;
        let test_accuracy = accuracy(&test_predictions, test_x.labels())?;
        let control = permutation_control(
            &train_x,
            &test_x,
            model_config,
            test_accuracy,
            eval.permutation_repetitions,
            eval.experiment_seed,
        )?;
        info!(
            "{kind}: cv {:.4}, test {:.4}, shuffled {:.4}, p {:.3}",
            mean(&cv),
            test_accuracy,
            mean(&control.shuffled_accuracies),
            control.p_value
        );
        entries.push(ModelReport {
            kind,
            cv_mean_accuracy: mean(&cv),
            cv_fold_accuracies: cv,
            test_accuracy,
            shuffled_mean_accuracy: mean(&control.shuffled_accuracies),
            shuffled_accuracies: control.shuffled_accuracies,
            permutation_p_value: control.p_value,
            confusion: confusion(&test_predictions, test_x.labels(), x.classes())?,
        });
        models.push(ModelOutcome {
            model,
            test_predictions,
        });
    }

    // first model wins ties
    let best = entries
        .iter()
        .enumerate()
        .fold(0, |b, (i, e)| if e.test_accuracy > entries[b].test_accuracy { i } else { b });
    let report = EvaluationReport {
        format_version: REPORT_FORMAT_VERSION,
        config: config.clone(),
        n_train: train_x.rows(),
        n_test: test_x.rows(),
        classes: x.classes(),
        baselines: Baselines {
            uniform_random_accuracy: uniform_random_baseline(x.classes()),
            majority_class_accuracy: majority_baseline(test_x.labels())?,
            bayes_accuracy: bayes_accuracy(config.generation.signal_probability)?,
        },
        best_model: BestModel {
            kind: entries[best].kind,
            index: best,
            criterion: "test_accuracy".into(),
        },
        models: entries,
    };
    Ok(ExperimentOutcome {
        report,
        population,
        train_indices,
        test_indices,
        standardizer,
        train_features: train_x,
        test_features: test_x,
        models,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::ModelKind;

    fn small() -> ExperimentConfig {
        let mut c = ExperimentConfig::default();
        c.generation.population_size = 300;
        c.evaluation.permutation_repetitions = 3;
        c.evaluation.k_folds = 3;
        c.models = ModelKind::ALL
            .iter()
            .map(|&k| {
                let mut m = TrainConfig::new(k, 5);
                m.logreg.epochs = 5;
                m.mlp.epochs = 5;
                m.mlp.hidden_units = 8;
                m.forest.n_trees = 5;
                m
            })
            .collect();
        c
    }

    #[test]
    fn report_is_consistent() {
        let out = run_experiment(&small()).unwrap();
        let r = &out.report;
        assert_eq!(r.n_train + r.n_test, 300);
        assert_eq!(r.n_test, 60);
        assert_eq!(r.models.len(), 3);
        for (m, o) in r.models.iter().zip(&out.models) {
            assert_eq!(m.cv_fold_accuracies.len(), 3);
            assert_eq!(m.shuffled_accuracies.len(), 3);
            assert!(m.permutation_p_value > 0.0 && m.permutation_p_value <= 1.0);
            assert_eq!(m.confusion.diagonal_fraction(), m.test_accuracy);
            assert_eq!(o.test_predictions.len(), r.n_test);
            assert_eq!(o.model.kind(), m.kind);
        }
        let best = &r.models[r.best_model.index];
        assert!(r.models.iter().all(|m| m.test_accuracy <= best.test_accuracy));
    }

    #[test]
    fn runs_are_deterministic() {
        let a = run_experiment(&small()).unwrap().report;
        let b = run_experiment(&small()).unwrap().report;
        assert_eq!(a, b);
    }
}
