//! Trains multinomial logistic regression on a fully signalled population
//! (every label drawn from the sign's ten traits) and compares held-out
//! accuracy with the Bayes ceiling of 0.10.
//!
//!     cargo run --example logistic_regression

use zodiac_lab::eval::{accuracy, bayes_accuracy, holdout_split};
use zodiac_lab::features::{apply_standardizer, encode, fit_standardizer};
use zodiac_lab::lexicon::{build_default_assignments, build_default_lexicon};
use zodiac_lab::models::{predict, train, Model, ModelKind, TrainConfig};
use zodiac_lab::synthpop::{generate_population, GenerationConfig};

fn main() -> zodiac_lab::Result<()> {
    let lexicon = build_default_lexicon();
    let table = build_default_assignments(&lexicon)?;
    let config = GenerationConfig {
        signal_probability: 1.0,
        ..Default::default()
    };
    let x = encode(&generate_population(&config, &lexicon, &table)?)?;
    let (train_idx, test_idx) = holdout_split(x.labels(), 0.2, 1)?;
    let (train_raw, test_raw) = (x.select_rows(&train_idx), x.select_rows(&test_idx));
    let all: Vec<usize> = (0..train_raw.rows()).collect();
    let params = fit_standardizer(&train_raw, &all)?;
    let (train_x, test_x) = (apply_standardizer(&train_raw, &params)?, apply_standardizer(&test_raw, &params)?);

    let model = train(&train_x, &TrainConfig::new(ModelKind::Logreg, 7))?;
    let acc = accuracy(&predict(&model, &test_x)?, test_x.labels())?;
    println!("test accuracy {acc:.4}, Bayes ceiling {:.4}", bayes_accuracy(1.0)?);

    // the largest weights should sit on sign columns of the sign's traits
    if let Model::LogReg(m) = &model.model {
        let aries = 0;
        let mut by_weight: Vec<(usize, f64)> = (0..m.classes()).map(|k| (k, m.weight(k, aries))).collect();
        by_weight.sort_by(|a, b| b.1.total_cmp(&a.1));
        let top: Vec<&str> = by_weight[..10]
            .iter()
            .map(|&(k, _)| lexicon.descriptors()[k].as_str())
            .collect();
        println!("classes most favoured by sign_Aries: {}", top.join(", "));
    }
    Ok(())
}
