//! One-hidden-layer perceptron: rectifier hidden units, softmax output,
//! mean cross-entropy, minibatch gradient descent.
//!
//! Weights are initialized uniformly in `±sqrt(6 / (fan_in + fan_out))`
//! from the init stream, first all of `W1` in `(hidden, input)` order and
//! then all of `W2` in `(class, hidden)` order; biases start at zero.

use crate::error::Result;
use crate::features::FeatureMatrix;
use crate::models::{axpy, dot, minibatch_descent, softmax_in_place, Model, TrainConfig, TrainedModel, INIT_STREAM};
use crate::rng::Pcg32;

/// Flat parameter buffer layout: `W1` input-major (`d` blocks of `H`),
/// `b1` (`H`), `W2` hidden-major (`H` blocks of `K`), `b2` (`K`).
#[derive(Clone, Debug, PartialEq)]
pub struct MlpModel {
    params: Vec<f64>,
    width: usize,
    hidden: usize,
    classes: usize,
}

#[derive(Clone, Copy)]
struct Layout {
    width: usize,
    hidden: usize,
    classes: usize,
}

impl Layout {
    fn b1(&self) -> std::ops::Range<usize> {
        let s = self.width * self.hidden;
        s..s + self.hidden
    }
    fn w2(&self) -> std::ops::Range<usize> {
        let s = (self.width + 1) * self.hidden;
        s..s + self.hidden * self.classes
    }
    fn b2(&self) -> std::ops::Range<usize> {
        let s = (self.width + 1) * self.hidden + self.hidden * self.classes;
        s..s + self.classes
    }
    fn len(&self) -> usize {
        self.b2().end
    }
}

impl MlpModel {
    fn layout(&self) -> Layout {
        Layout {
            width: self.width,
            hidden: self.hidden,
            classes: self.classes,
        }
    }

    /// Glorot-uniform initialization from `Pcg32::new(seed, INIT_STREAM)`.
    pub fn initialize(width: usize, hidden: usize, classes: usize, seed: u64) -> MlpModel {
        let layout = Layout { width, hidden, classes };
        let mut params = vec![0.0; layout.len()];
        let mut rng = Pcg32::new(seed, INIT_STREAM);
        let limit1 = (6.0 / (width + hidden) as f64).sqrt();
        for h in 0..hidden {
            for j in 0..width {
                params[j * hidden + h] = (2.0 * rng.next_unit() - 1.0) * limit1;
            }
        }
        let limit2 = (6.0 / (hidden + classes) as f64).sqrt();
        let w2 = layout.w2().start;
        for k in 0..classes {
            for h in 0..hidden {
                params[w2 + h * classes + k] = (2.0 * rng.next_unit() - 1.0) * limit2;
            }
        }
        MlpModel {
            params,
            width,
            hidden,
            classes,
        }
    }

    /// Builds a model from `W1` (`H x d`), `b1`, `W2` (`K x H`) and `b2`.
    pub fn from_layers(w1: &[Vec<f64>], b1: &[f64], w2: &[Vec<f64>], b2: &[f64]) -> Option<MlpModel> {
        let hidden = b1.len();
        let classes = b2.len();
        if hidden == 0 || classes == 0 || w1.len() != hidden || w2.len() != classes {
            return None;
        }
        let width = w1[0].len();
        if w1.iter().any(|r| r.len() != width) || w2.iter().any(|r| r.len() != hidden) {
            return None;
        }
        let layout = Layout { width, hidden, classes };
        let mut params = vec![0.0; layout.len()];
        for (h, row) in w1.iter().enumerate() {
            for (j, &w) in row.iter().enumerate() {
                params[j * hidden + h] = w;
            }
        }
        params[layout.b1()].copy_from_slice(b1);
        let w2s = layout.w2().start;
        for (k, row) in w2.iter().enumerate() {
            for (h, &w) in row.iter().enumerate() {
                params[w2s + h * classes + k] = w;
            }
        }
        params[layout.b2()].copy_from_slice(b2);
        Some(MlpModel {
            params,
            width,
            hidden,
            classes,
        })
    }

    pub fn input_width(&self) -> usize {
        self.width
    }

    pub fn hidden_units(&self) -> usize {
        self.hidden
    }

    pub fn classes(&self) -> usize {
        self.classes
    }

    /// `H x d` input weights.
    pub fn w1(&self) -> Vec<Vec<f64>> {
        (0..self.hidden)
            .map(|h| (0..self.width).map(|j| self.params[j * self.hidden + h]).collect())
            .collect()
    }

    pub fn b1(&self) -> &[f64] {
        &self.params[self.layout().b1()]
    }

    /// `K x H` output weights.
    pub fn w2(&self) -> Vec<Vec<f64>> {
        let w2 = &self.params[self.layout().w2()];
        (0..self.classes)
            .map(|k| (0..self.hidden).map(|h| w2[h * self.classes + k]).collect())
            .collect()
    }

    pub fn b2(&self) -> &[f64] {
        &self.params[self.layout().b2()]
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    pub(crate) fn row_proba(&self, row: &[f64], out: &mut [f64]) {
        let mut hidden = vec![0.0; self.hidden];
        forward(&self.params, self.layout(), row, &mut hidden, out);
        softmax_in_place(out);
    }

    /// Mean cross-entropy on the given rows and its gradient in the flat
    /// parameter layout.
    pub fn loss_and_gradient(&self, x: &FeatureMatrix, rows: &[usize]) -> (f64, Vec<f64>) {
        let mut grad = vec![0.0; self.params.len()];
        let loss = batch_objective(&self.params, self.layout(), x, rows, &mut grad);
        (loss, grad)
    }
}

/// Fills `hidden` with pre-activations then rectifies them in place, and
/// `scores` with output logits.
#[inline]
fn forward(params: &[f64], l: Layout, row: &[f64], hidden: &mut [f64], scores: &mut [f64]) {
    hidden.copy_from_slice(&params[l.b1()]);
    for (j, &x) in row.iter().enumerate() {
        if x != 0.0 {
            axpy(hidden, x, &params[j * l.hidden..(j + 1) * l.hidden]);
        }
    }
    for a in hidden.iter_mut() {
        if *a < 0.0 {
            *a = 0.0;
        }
    }
    scores.copy_from_slice(&params[l.b2()]);
    let w2 = &params[l.w2()];
    for (h, &a) in hidden.iter().enumerate() {
        if a > 0.0 {
            axpy(scores, a, &w2[h * l.classes..(h + 1) * l.classes]);
        }
    }
}

fn batch_objective(params: &[f64], l: Layout, x: &FeatureMatrix, rows: &[usize], grad: &mut [f64]) -> f64 {
    let mut hidden = vec![0.0; l.hidden];
    let mut probs = vec![0.0; l.classes];
    let mut dhidden = vec![0.0; l.hidden];
    let scale = 1.0 / rows.len() as f64;
    let w2 = &params[l.w2()];
    let mut loss = 0.0;
    for &i in rows {
        let row = x.row(i);
        let y = x.labels()[i];
        forward(params, l, row, &mut hidden, &mut probs);
        let target = probs[y];
        let (max, lse) = softmax_in_place(&mut probs);
        loss += max + lse - target;
        probs[y] -= 1.0;
        for p in probs.iter_mut() {
            *p *= scale;
        }
        // probs now holds the scaled output delta
        axpy(&mut grad[l.b2()], 1.0, &probs);
        let gw2 = l.w2().start;
        for (h, &a) in hidden.iter().enumerate() {
            if a > 0.0 {
                let s = gw2 + h * l.classes;
                axpy(&mut grad[s..s + l.classes], a, &probs);
                dhidden[h] = dot(&w2[h * l.classes..(h + 1) * l.classes], &probs);
            } else {
                dhidden[h] = 0.0;
            }
        }
        axpy(&mut grad[l.b1()], 1.0, &dhidden);
        for (j, &v) in row.iter().enumerate() {
            if v != 0.0 {
                axpy(&mut grad[j * l.hidden..(j + 1) * l.hidden], v, &dhidden);
            }
        }
    }
    loss * scale
}

pub fn train_mlp(x: &FeatureMatrix, config: &TrainConfig) -> Result<TrainedModel> {
    let p = &config.mlp;
    let mut model = MlpModel::initialize(x.width(), p.hidden_units, x.classes(), config.seed);
    let layout = model.layout();
    minibatch_descent(
        "mlp",
        &mut model.params,
        x.rows(),
        p.epochs,
        p.batch_size,
        p.learning_rate,
        config.seed,
        |batch, params, grad| batch_objective(params, layout, x, batch, grad),
    )?;
    Ok(TrainedModel {
        config: config.clone(),
        model: Model::Mlp(model),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{predict, predict_proba, ModelKind};

    fn xor(copies: usize) -> FeatureMatrix {
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for _ in 0..copies {
            for (a, b) in [(0.0, 0.0), (0.0, 1.0), (1.0, 0.0), (1.0, 1.0)] {
                rows.push(vec![a, b]);
                labels.push((a != b) as usize);
            }
        }
        FeatureMatrix::from_rows(&rows, labels, 2).unwrap()
    }

    #[test]
    fn learns_xor() {
        let x = xor(1);
        let mut c = TrainConfig::new(ModelKind::Mlp, 5);
        c.mlp.hidden_units = 8;
        c.mlp.learning_rate = 0.5;
        c.mlp.epochs = 3000;
        c.mlp.batch_size = 4;
        let m = train_mlp(&x, &c).unwrap();
        assert_eq!(predict(&m, &x).unwrap(), x.labels());
    }

    #[test]
    fn untrained_rows_normalized() {
        let x = xor(2);
        let mut c = TrainConfig::new(ModelKind::Mlp, 1);
        c.mlp.epochs = 0;
        let m = train_mlp(&x, &c).unwrap();
        let p = predict_proba(&m, &x).unwrap();
        for i in 0..x.rows() {
            assert!((p.row(i).iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
        // duplicated inputs give identical rows
        assert_eq!(p.row(0), p.row(4));
        if let Model::Mlp(inner) = &m.model {
            assert!(inner.b1().iter().chain(inner.b2()).all(|&b| b == 0.0));
        }
    }

    #[test]
    fn glorot_bounds() {
        let m = MlpModel::initialize(28, 64, 100, 9);
        let l1 = (6.0f64 / 92.0).sqrt();
        let l2 = (6.0f64 / 164.0).sqrt();
        assert!(m.w1().iter().flatten().all(|w| w.abs() <= l1));
        assert!(m.w2().iter().flatten().all(|w| w.abs() <= l2));
        assert_eq!(MlpModel::initialize(28, 64, 100, 9), m);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let mut rng = Pcg32::new(23, 4);
        for instance in 0..10 {
            let (n, d, h, k) = (5, 4, 6, 3);
            let rows: Vec<Vec<f64>> = (0..n).map(|_| (0..d).map(|_| rng.normal(0.0, 1.0)).collect()).collect();
            let labels = (0..n).map(|_| rng.index(k)).collect();
            let x = FeatureMatrix::from_rows(&rows, labels, k).unwrap();
            let mut m = MlpModel::initialize(d, h, k, instance);
            for p in m.params_mut() {
                *p += rng.normal(0.0, 0.1);
            }
            let all: Vec<usize> = (0..n).collect();
            let (_, grad) = m.loss_and_gradient(&x, &all);
            let step = 1e-5;
            for _ in 0..10 {
                let idx = rng.index(m.params().len());
                let orig = m.params()[idx];
                m.params_mut()[idx] = orig + step;
                let up = m.loss_and_gradient(&x, &all).0;
                m.params_mut()[idx] = orig - step;
                let down = m.loss_and_gradient(&x, &all).0;
                m.params_mut()[idx] = orig;
                let numeric = (up - down) / (2.0 * step);
                let analytic = grad[idx];
                if numeric.abs().max(analytic.abs()) < 1e-9 {
                    // inactive rectifier: both sides are exactly flat
                    assert!((numeric - analytic).abs() < 1e-9);
                    continue;
                }
                let rel = (numeric - analytic).abs() / numeric.abs().max(analytic.abs());
                assert!(rel < 1e-4, "instance {instance} param {idx}: {numeric} vs {analytic}");
            }
        }
    }

    #[test]
    fn layer_round_trip() {
        let m = MlpModel::initialize(3, 4, 2, 1);
        let back = MlpModel::from_layers(&m.w1(), m.b1(), &m.w2(), m.b2()).unwrap();
        assert_eq!(back, m);
    }
}
