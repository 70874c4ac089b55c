//! Random forest on XOR (no single split helps, two levels solve it) and a
//! check that tree-level parallelism does not change the fitted forest.
//!
//!     cargo run --example random_forest

use zodiac_lab::features::FeatureMatrix;
use zodiac_lab::models::{predict, train_forest_with, ModelKind, Parallelism, TrainConfig};

fn main() -> zodiac_lab::Result<()> {
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for i in 0..200 {
        let (a, b) = (i % 2, (i / 2) % 2);
        rows.push(vec![a as f64, b as f64]);
        labels.push(a ^ b);
    }
    let x = FeatureMatrix::from_rows(&rows, labels, 2)?;

    for depth in [1, 2] {
        let mut config = TrainConfig::new(ModelKind::Forest, 3);
        config.forest.n_trees = 25;
        config.forest.max_depth = depth;
        config.forest.features_per_split = 2;
        let model = train_forest_with(&x, &config, Parallelism::Rayon)?;
        let hits = predict(&model, &x)?.iter().zip(x.labels()).filter(|(p, t)| p == t).count();
        println!("max_depth {depth}: training accuracy {:.3}", hits as f64 / x.rows() as f64);

        let sequential = train_forest_with(&x, &config, Parallelism::Sequential)?;
        assert_eq!(sequential, model);
    }
    println!("sequential and parallel training produced identical forests");
    Ok(())
}
