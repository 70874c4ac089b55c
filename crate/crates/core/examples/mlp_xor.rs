//! A one-hidden-layer perceptron learning XOR.
//!
//!     cargo run --example mlp_xor

use zodiac_lab::features::FeatureMatrix;
use zodiac_lab::models::{predict_proba, train, ModelKind, TrainConfig};

fn main() -> zodiac_lab::Result<()> {
    let x = FeatureMatrix::from_rows(
        &[vec![0.0, 0.0], vec![0.0, 1.0], vec![1.0, 0.0], vec![1.0, 1.0]],
        vec![0, 1, 1, 0],
        2,
    )?;
    let mut config = TrainConfig::new(ModelKind::Mlp, 11);
    config.mlp.hidden_units = 8;
    config.mlp.learning_rate = 0.5;
    config.mlp.epochs = 3000;
    config.mlp.batch_size = 4;
    let model = train(&x, &config)?;
    let proba = predict_proba(&model, &x)?;
    for i in 0..x.rows() {
        println!("{:?} -> P(1) = {:.3}", x.row(i), proba.row(i)[1]);
    }
    Ok(())
}
