//! The complete protocol (split, cross-validation, final fit, shuffled-label
//! control, baselines) on a reduced configuration, printed as a table.
//! Pass a signal probability as the first argument (default 0.1).
//!
//!     cargo run --example full_experiment -- 0.5

use zodiac_lab::config::ExperimentConfig;
use zodiac_lab::eval::run_experiment;

fn main() -> zodiac_lab::Result<()> {
    let p: f64 = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(0.1);
    let mut config = ExperimentConfig::default();
    config.generation.signal_probability = p;
    config.generation.population_size = 2000;
    config.evaluation.permutation_repetitions = 4;
    for m in &mut config.models {
        m.logreg.epochs = 60;
        m.mlp.epochs = 30;
        m.forest.n_trees = 40;
    }

    let report = run_experiment(&config)?.report;
    let b = &report.baselines;
    println!(
        "p = {p}: uniform {:.4}, majority {:.4}, Bayes {:.4} ({} train / {} test rows)",
        b.uniform_random_accuracy, b.majority_class_accuracy, b.bayes_accuracy, report.n_train, report.n_test
    );
    println!("model    cv mean   test   shuffled  p-value  diagonal");
    for m in &report.models {
        println!(
            "{:<8} {:7.4} {:7.4} {:9.4} {:8.2} {:9.4}",
            m.kind.name(),
            m.cv_mean_accuracy,
            m.test_accuracy,
            m.shuffled_mean_accuracy,
            m.permutation_p_value,
            m.confusion.diagonal_fraction()
        );
    }
    println!("best model by {}: {}", report.best_model.criterion, report.best_model.kind);
    Ok(())
}
