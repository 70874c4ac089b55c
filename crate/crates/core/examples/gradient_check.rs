//! Compares analytic gradients of both gradient-trained models with central
//! finite differences.
//!
//!     cargo run --example gradient_check

use zodiac_lab::features::FeatureMatrix;
use zodiac_lab::models::{LogRegModel, MlpModel};
use zodiac_lab::rng::Pcg32;

fn finite_difference(params: &mut [f64], idx: usize, h: f64, loss: impl Fn(&[f64]) -> f64) -> f64 {
    let orig = params[idx];
    params[idx] = orig + h;
    let up = loss(params);
    params[idx] = orig - h;
    let down = loss(params);
    params[idx] = orig;
    (up - down) / (2.0 * h)
}

fn main() -> zodiac_lab::Result<()> {
    let mut rng = Pcg32::new(1, 1);
    let rows: Vec<Vec<f64>> = (0..10).map(|_| (0..4).map(|_| rng.normal(0.0, 1.0)).collect()).collect();
    let labels = (0..10).map(|_| rng.index(3)).collect();
    let x = FeatureMatrix::from_rows(&rows, labels, 3)?;
    let all: Vec<usize> = (0..10).collect();
    let h = 1e-5;

    let mut lr = LogRegModel::zeros(4, 3);
    for p in lr.params_mut() {
        *p = rng.normal(0.0, 0.5);
    }
    let (_, grad) = lr.loss_and_gradient(&x, &all, 0.01);
    let mut params = lr.params().to_vec();
    let worst = (0..params.len())
        .map(|i| {
            let numeric = finite_difference(&mut params, i, h, |p| {
                let mut m = lr.clone();
                m.params_mut().copy_from_slice(p);
                m.loss_and_gradient(&x, &all, 0.01).0
            });
            (numeric - grad[i]).abs() / numeric.abs().max(grad[i].abs()).max(1e-8)
        })
        .fold(0.0, f64::max);
    println!("logreg: {} parameters, max relative error {worst:.2e}", params.len());

    let mlp = MlpModel::initialize(4, 5, 3, 2);
    let (_, grad) = mlp.loss_and_gradient(&x, &all);
    let mut params = mlp.params().to_vec();
    let worst = (0..params.len())
        .map(|i| {
            let numeric = finite_difference(&mut params, i, h, |p| {
                let mut m = mlp.clone();
                m.params_mut().copy_from_slice(p);
                m.loss_and_gradient(&x, &all).0
            });
            (numeric - grad[i]).abs() / numeric.abs().max(grad[i].abs()).max(1e-8)
        })
        .fold(0.0, f64::max);
    println!("mlp:    {} parameters, max relative error {worst:.2e}", params.len());
    Ok(())
}
