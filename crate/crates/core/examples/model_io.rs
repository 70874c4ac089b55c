//! Saves a trained model to JSON, loads it back and checks that predictions
//! are unchanged.
//!
//!     cargo run --example model_io

use zodiac_lab::features::encode;
use zodiac_lab::lexicon::{build_default_assignments, build_default_lexicon};
use zodiac_lab::models::io::{model_from_json, model_to_json};
use zodiac_lab::models::{predict_proba, train, ModelKind, TrainConfig};
use zodiac_lab::synthpop::{generate_population, GenerationConfig};

fn main() -> zodiac_lab::Result<()> {
    let lexicon = build_default_lexicon();
    let table = build_default_assignments(&lexicon)?;
    let gen = GenerationConfig {
        population_size: 500,
        ..Default::default()
    };
    let x = encode(&generate_population(&gen, &lexicon, &table)?)?;
    for kind in ModelKind::ALL {
        let mut config = TrainConfig::new(kind, 1);
        config.logreg.epochs = 20;
        config.mlp.epochs = 10;
        config.forest.n_trees = 10;
        let model = train(&x, &config)?;
        let json = model_to_json(&model)?;
        let back = model_from_json(&json)?;
        assert_eq!(predict_proba(&back, &x)?, predict_proba(&model, &x)?);
        println!("{kind}: {} bytes of JSON, predictions identical after reload", json.len());
    }
    Ok(())
}
