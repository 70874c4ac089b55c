//! The shuffled-label control on its own: real-label accuracy against the
//! accuracies of models retrained on permuted labels, with no signal and with
//! full signal.
//!
//!     cargo run --example permutation_control

use zodiac_lab::eval::{accuracy, holdout_split, mean, permutation_control};
use zodiac_lab::features::{apply_standardizer, encode, fit_standardizer};
use zodiac_lab::lexicon::{build_default_assignments, build_default_lexicon};
use zodiac_lab::models::{predict, train, ModelKind, TrainConfig};
use zodiac_lab::synthpop::{generate_population, GenerationConfig};

fn main() -> zodiac_lab::Result<()> {
    let lexicon = build_default_lexicon();
    let table = build_default_assignments(&lexicon)?;
    let mut config = TrainConfig::new(ModelKind::Logreg, 7);
    config.logreg.epochs = 50;

    for p in [0.0, 1.0] {
        let gen = GenerationConfig {
            population_size: 2000,
            signal_probability: p,
            ..Default::default()
        };
        let x = encode(&generate_population(&gen, &lexicon, &table)?)?;
        let (tr, te) = holdout_split(x.labels(), 0.2, 5)?;
        let (train_raw, test_raw) = (x.select_rows(&tr), x.select_rows(&te));
        let all: Vec<usize> = (0..train_raw.rows()).collect();
        let params = fit_standardizer(&train_raw, &all)?;
        let (train_x, test_x) = (apply_standardizer(&train_raw, &params)?, apply_standardizer(&test_raw, &params)?);

        let model = train(&train_x, &config)?;
        let real = accuracy(&predict(&model, &test_x)?, test_x.labels())?;
        let control = permutation_control(&train_x, &test_x, &config, real, 9, 5)?;
        println!(
            "p = {p}: real {real:.4}, shuffled mean {:.4}, permutation p-value {:.2}",
            mean(&control.shuffled_accuracies),
            control.p_value
        );
    }
    Ok(())
}
