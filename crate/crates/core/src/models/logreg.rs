//! Multinomial logistic regression trained by minibatch gradient descent on
//! mean softmax cross-entropy plus `(l2 / 2) * ||W||^2` (biases are not
//! penalized). Parameters start at zero.

use crate::error::Result;
use crate::features::FeatureMatrix;
use crate::models::{axpy, minibatch_descent, softmax_in_place, Model, TrainConfig, TrainedModel};

/// Parameters live in one flat buffer: the weights feature-major
/// (`d` blocks of `K` class weights), then the `K` biases.
#[derive(Clone, Debug, PartialEq)]
pub struct LogRegModel {
    params: Vec<f64>,
    width: usize,
    classes: usize,
}

impl LogRegModel {
    pub fn zeros(width: usize, classes: usize) -> LogRegModel {
        LogRegModel {
            params: vec![0.0; (width + 1) * classes],
            width,
            classes,
        }
    }

    /// Builds a model from a `K x d` weight matrix and `K` biases.
    pub fn from_weights(weights: &[Vec<f64>], biases: &[f64]) -> Option<LogRegModel> {
        let classes = biases.len();
        if weights.len() != classes || classes == 0 {
            return None;
        }
        let width = weights[0].len();
        if weights.iter().any(|w| w.len() != width) {
            return None;
        }
        let mut m = LogRegModel::zeros(width, classes);
        for (k, row) in weights.iter().enumerate() {
            for (j, &w) in row.iter().enumerate() {
                m.params[j * classes + k] = w;
            }
        }
        m.params[width * classes..].copy_from_slice(biases);
        Some(m)
    }

    pub fn input_width(&self) -> usize {
        self.width
    }

    pub fn classes(&self) -> usize {
        self.classes
    }

    pub fn weight(&self, class: usize, feature: usize) -> f64 {
        self.params[feature * self.classes + class]
    }

    /// `K x d` weights.
    pub fn weights(&self) -> Vec<Vec<f64>> {
        (0..self.classes)
            .map(|k| (0..self.width).map(|j| self.weight(k, j)).collect())
            .collect()
    }

    pub fn biases(&self) -> &[f64] {
        &self.params[self.width * self.classes..]
    }

    /// Flat parameter buffer (layout in the type docs).
    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    fn scores(params: &[f64], width: usize, classes: usize, row: &[f64], out: &mut [f64]) {
        out.copy_from_slice(&params[width * classes..]);
        for (j, &x) in row.iter().enumerate() {
            if x != 0.0 {
                axpy(out, x, &params[j * classes..(j + 1) * classes]);
            }
        }
    }

    pub(crate) fn row_proba(&self, row: &[f64], out: &mut [f64]) {
        Self::scores(&self.params, self.width, self.classes, row, out);
        softmax_in_place(out);
    }

    /// Objective on the given rows and its gradient, in the flat parameter
    /// layout: mean cross-entropy + `(l2 / 2) * ||W||^2`.
    pub fn loss_and_gradient(&self, x: &FeatureMatrix, rows: &[usize], l2_penalty: f64) -> (f64, Vec<f64>) {
        let mut grad = vec![0.0; self.params.len()];
        let loss = batch_objective(&self.params, self.width, self.classes, x, rows, l2_penalty, &mut grad);
        (loss, grad)
    }
}

fn batch_objective(
    params: &[f64],
    width: usize,
    classes: usize,
    x: &FeatureMatrix,
    rows: &[usize],
    l2_penalty: f64,
    grad: &mut [f64],
) -> f64 {
    let mut probs = vec![0.0; classes];
    let mut loss = 0.0;
    let scale = 1.0 / rows.len() as f64;
    let (wgrad, bgrad) = grad.split_at_mut(width * classes);
    for &i in rows {
        let row = x.row(i);
        let y = x.labels()[i];
        LogRegModel::scores(params, width, classes, row, &mut probs);
        let target = probs[y];
        let (max, lse) = softmax_in_place(&mut probs);
        loss += max + lse - target;
        probs[y] -= 1.0;
        axpy(bgrad, scale, &probs);
        for (j, &v) in row.iter().enumerate() {
            if v != 0.0 {
                axpy(&mut wgrad[j * classes..(j + 1) * classes], v * scale, &probs);
            }
        }
    }
    let weights = &params[..width * classes];
    if l2_penalty > 0.0 {
        axpy(wgrad, l2_penalty, weights);
    }
    let norm: f64 = weights.iter().map(|w| w * w).sum();
    loss * scale + 0.5 * l2_penalty * norm
}

pub fn train_logreg(x: &FeatureMatrix, config: &TrainConfig) -> Result<TrainedModel> {
    let p = &config.logreg;
    let (width, classes) = (x.width(), x.classes());
    let mut model = LogRegModel::zeros(width, classes);
    minibatch_descent(
        "logreg",
        &mut model.params,
        x.rows(),
        p.epochs,
        p.batch_size,
        p.learning_rate,
        config.seed,
        |batch, params, grad| batch_objective(params, width, classes, x, batch, p.l2_penalty, grad),
    )?;
    Ok(TrainedModel {
        config: config.clone(),
        model: Model::LogReg(model),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{predict, predict_proba, ModelKind};
    use crate::rng::Pcg32;

    fn config(epochs: usize) -> TrainConfig {
        let mut c = TrainConfig::new(ModelKind::Logreg, 3);
        c.logreg.epochs = epochs;
        c.logreg.batch_size = 2;
        c.logreg.learning_rate = 0.5;
        c
    }

    #[test]
    fn separable_toy_set_is_fitted() {
        let x = FeatureMatrix::from_rows(
            &[vec![0.0, 0.0], vec![0.0, 1.0], vec![3.0, 0.0], vec![3.0, 1.0]],
            vec![0, 0, 1, 1],
            2,
        )
        .unwrap();
        let m = train_logreg(&x, &config(300)).unwrap();
        assert_eq!(predict(&m, &x).unwrap(), vec![0, 0, 1, 1]);
    }

    #[test]
    fn zero_epochs_gives_uniform() {
        let x = FeatureMatrix::from_rows(&[vec![1.0, -2.0], vec![5.0, 0.5]], vec![0, 2], 4).unwrap();
        let m = train_logreg(&x, &config(0)).unwrap();
        let p = predict_proba(&m, &x).unwrap();
        for i in 0..2 {
            assert!(p.row(i).iter().all(|&v| (v - 0.25).abs() < 1e-15));
        }
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let mut rng = Pcg32::new(17, 9);
        for instance in 0..10 {
            let (n, d, k) = (6, 4, 5);
            let rows: Vec<Vec<f64>> = (0..n).map(|_| (0..d).map(|_| rng.normal(0.0, 1.0)).collect()).collect();
            let labels = (0..n).map(|_| rng.index(k)).collect();
            let x = FeatureMatrix::from_rows(&rows, labels, k).unwrap();
            let mut m = LogRegModel::zeros(d, k);
            for p in m.params_mut() {
                *p = rng.normal(0.0, 0.5);
            }
            let all: Vec<usize> = (0..n).collect();
            let l2 = 0.01;
            let (_, grad) = m.loss_and_gradient(&x, &all, l2);
            let h = 1e-5;
            for _ in 0..10 {
                let idx = rng.index(m.params().len());
                let orig = m.params()[idx];
                m.params_mut()[idx] = orig + h;
                let up = m.loss_and_gradient(&x, &all, l2).0;
                m.params_mut()[idx] = orig - h;
                let down = m.loss_and_gradient(&x, &all, l2).0;
                m.params_mut()[idx] = orig;
                let numeric = (up - down) / (2.0 * h);
                let rel = (numeric - grad[idx]).abs() / numeric.abs().max(grad[idx].abs()).max(1e-8);
                assert!(rel < 1e-4, "instance {instance} param {idx}: {numeric} vs {}", grad[idx]);
            }
        }
    }

    #[test]
    fn weight_matrix_round_trip() {
        let w = vec![vec![1.0, 2.0, 3.0], vec![4.0, 5.0, 6.0]];
        let m = LogRegModel::from_weights(&w, &[0.5, -0.5]).unwrap();
        assert_eq!(m.weights(), w);
        assert_eq!(m.biases(), &[0.5, -0.5]);
        assert_eq!(m.weight(1, 0), 4.0);
    }
}
