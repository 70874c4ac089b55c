//! The three classifier families behind one train/predict interface.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::FeatureMatrix;
use crate::rng::Pcg32;

pub mod forest;
pub mod io;
pub mod logreg;
pub mod mlp;

pub use forest::{train_forest, train_forest_with, ForestModel, Parallelism};
pub use logreg::{train_logreg, LogRegModel};
pub use mlp::{train_mlp, MlpModel};

/// PCG stream for the per-epoch minibatch order.
pub(crate) const SHUFFLE_STREAM: u64 = 0;
/// PCG stream for weight initialization.
pub(crate) const INIT_STREAM: u64 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Logreg,
    Forest,
    Mlp,
}

impl ModelKind {
    pub const ALL: [ModelKind; 3] = [ModelKind::Logreg, ModelKind::Forest, ModelKind::Mlp];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Logreg => "logreg",
            ModelKind::Forest => "forest",
            ModelKind::Mlp => "mlp",
        }
    }

    pub fn from_name(name: &str) -> Option<ModelKind> {
        Self::ALL.iter().copied().find(|k| k.name() == name)
    }
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LogRegParams {
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub l2_penalty: f64,
}

impl Default for LogRegParams {
    fn default() -> Self {
        LogRegParams {
            learning_rate: 0.1,
            epochs: 200,
            batch_size: 64,
            l2_penalty: 1e-4,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ForestParams {
    pub n_trees: usize,
    pub max_depth: usize,
    pub min_samples_split: usize,
    pub features_per_split: usize,
}

impl Default for ForestParams {
    fn default() -> Self {
        ForestParams {
            n_trees: 100,
            max_depth: 12,
            min_samples_split: 2,
            // floor(sqrt(28))
            features_per_split: 5,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MlpParams {
    pub hidden_units: usize,
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch_size: usize,
}

impl Default for MlpParams {
    fn default() -> Self {
        MlpParams {
            hidden_units: 64,
            learning_rate: 0.05,
            epochs: 200,
            batch_size: 64,
        }
    }
}

/// Which model to train plus the hyperparameters of every family; only the
/// section matching `kind` is used.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub kind: ModelKind,
    pub seed: u64,
    pub logreg: LogRegParams,
    pub forest: ForestParams,
    pub mlp: MlpParams,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig::new(ModelKind::Logreg, 0)
    }
}

impl TrainConfig {
    pub fn new(kind: ModelKind, seed: u64) -> TrainConfig {
        TrainConfig {
            kind,
            seed,
            logreg: LogRegParams::default(),
            forest: ForestParams::default(),
            mlp: MlpParams::default(),
        }
    }

    /// Validates the section for `kind`. `prefix` is prepended to field
    /// names in errors (e.g. `models[0]`). Zero epochs are accepted and
    /// leave the initial parameters untouched.
    pub fn validate(&self, prefix: &str) -> Result<()> {
        let field = |section: &str, name: &str| format!("{prefix}.{section}.{name}");
        let positive = |v: usize, section: &str, name: &str| {
            if v == 0 {
                Err(Error::invalid(field(section, name), "must be a positive integer"))
            } else {
                Ok(())
            }
        };
        let rate = |v: f64, section: &str, name: &str| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::invalid(field(section, name), format!("must be positive, got {v}")))
            }
        };
        match self.kind {
            ModelKind::Logreg => {
                let p = &self.logreg;
                rate(p.learning_rate, "logreg", "learning_rate")?;
                positive(p.batch_size, "logreg", "batch_size")?;
                if !(p.l2_penalty.is_finite() && p.l2_penalty >= 0.0) {
                    return Err(Error::invalid(field("logreg", "l2_penalty"), "must be non-negative"));
                }
            }
            ModelKind::Forest => {
                let p = &self.forest;
                positive(p.n_trees, "forest", "n_trees")?;
                positive(p.max_depth, "forest", "max_depth")?;
                positive(p.min_samples_split, "forest", "min_samples_split")?;
                positive(p.features_per_split, "forest", "features_per_split")?;
            }
            ModelKind::Mlp => {
                let p = &self.mlp;
                positive(p.hidden_units, "mlp", "hidden_units")?;
                rate(p.learning_rate, "mlp", "learning_rate")?;
                positive(p.batch_size, "mlp", "batch_size")?;
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Model {
    LogReg(LogRegModel),
    Forest(ForestModel),
    Mlp(MlpModel),
}

/// A fitted model together with the configuration that produced it.
#[derive(Clone, Debug, PartialEq)]
pub struct TrainedModel {
    pub config: TrainConfig,
    pub model: Model,
}

impl TrainedModel {
    pub fn kind(&self) -> ModelKind {
        self.config.kind
    }

    pub fn input_width(&self) -> usize {
        match &self.model {
            Model::LogReg(m) => m.input_width(),
            Model::Forest(m) => m.input_width(),
            Model::Mlp(m) => m.input_width(),
        }
    }

    pub fn classes(&self) -> usize {
        match &self.model {
            Model::LogReg(m) => m.classes(),
            Model::Forest(m) => m.classes(),
            Model::Mlp(m) => m.classes(),
        }
    }

    fn write_row_proba(&self, row: &[f64], out: &mut [f64]) {
        match &self.model {
            Model::LogReg(m) => m.row_proba(row, out),
            Model::Forest(m) => m.row_proba(row, out),
            Model::Mlp(m) => m.row_proba(row, out),
        }
    }
}

/// Trains the model family selected by `config.kind`.
pub fn train(x: &FeatureMatrix, config: &TrainConfig) -> Result<TrainedModel> {
    config.validate("model")?;
    if x.rows() == 0 {
        return Err(Error::Empty("training matrix"));
    }
    match config.kind {
        ModelKind::Logreg => train_logreg(x, config),
        ModelKind::Forest => train_forest(x, config),
        ModelKind::Mlp => train_mlp(x, config),
    }
}

/// Row-major `n x K` class probabilities.
#[derive(Clone, Debug, PartialEq)]
pub struct Probabilities {
    values: Vec<f64>,
    classes: usize,
}

impl Probabilities {
    pub fn rows(&self) -> usize {
        self.values.len() / self.classes
    }

    pub fn classes(&self) -> usize {
        self.classes
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.classes..(i + 1) * self.classes]
    }
}

pub fn predict_proba(model: &TrainedModel, x: &FeatureMatrix) -> Result<Probabilities> {
    if x.width() != model.input_width() {
        return Err(Error::WidthMismatch {
            expected: model.input_width(),
            found: x.width(),
        });
    }
    let k = model.classes();
    let mut values = vec![0.0; x.rows() * k];
    for (i, out) in values.chunks_exact_mut(k).enumerate() {
        model.write_row_proba(x.row(i), out);
    }
    Ok(Probabilities { values, classes: k })
}

/// Most probable class per row, lowest index on ties.
pub fn predict(model: &TrainedModel, x: &FeatureMatrix) -> Result<Vec<usize>> {
    let proba = predict_proba(model, x)?;
    Ok((0..proba.rows()).map(|i| argmax(proba.row(i))).collect())
}

/// Index of the largest entry; the first one wins ties.
pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// Numerically stable softmax (max subtracted before exponentiating).
pub fn softmax(scores: &[f64]) -> Result<Vec<f64>> {
    if scores.iter().any(|s| !s.is_finite()) {
        return Err(Error::NonFinite);
    }
    let mut out = scores.to_vec();
    softmax_in_place(&mut out);
    Ok(out)
}

/// In-place softmax; returns `ln(sum(exp(s - max)))` so callers can form
/// log-probabilities as `s - max - lse`.
#[inline]
pub(crate) fn softmax_in_place(scores: &mut [f64]) -> (f64, f64) {
    let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for s in scores.iter_mut() {
        *s = (*s - max).exp();
        sum += *s;
    }
    let inv = 1.0 / sum;
    for s in scores.iter_mut() {
        *s *= inv;
    }
    (max, sum.ln())
}

/// `y += a * x`
#[inline]
pub(crate) fn axpy(y: &mut [f64], a: f64, x: &[f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

/// Dot product with eight interleaved partial sums, combined in a fixed
/// order so the result is reproducible.
#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = [0.0; 8];
    let chunks_a = a.chunks_exact(8);
    let chunks_b = b.chunks_exact(8);
    let (ra, rb) = (chunks_a.remainder(), chunks_b.remainder());
    for (ca, cb) in chunks_a.zip(chunks_b) {
        for l in 0..8 {
            acc[l] += ca[l] * cb[l];
        }
    }
    let mut tail = 0.0;
    for (x, y) in ra.iter().zip(rb) {
        tail += x * y;
    }
    ((acc[0] + acc[1]) + (acc[2] + acc[3])) + ((acc[4] + acc[5]) + (acc[6] + acc[7])) + tail
}

/// Shared minibatch gradient-descent loop.
///
/// Each epoch reshuffles `0..n` from the identity with Fisher-Yates on the
/// shuffle stream and walks it in chunks of `batch_size`. `batch_step`
/// receives the batch row indices, the current parameters and a zeroed
/// gradient buffer; it returns the batch loss and fills the (already
/// averaged) gradient.
pub(crate) fn minibatch_descent<F>(
    model: &'static str,
    params: &mut [f64],
    rows: usize,
    epochs: usize,
    batch_size: usize,
    learning_rate: f64,
    seed: u64,
    mut batch_step: F,
) -> Result<()>
where
    F: FnMut(&[usize], &[f64], &mut [f64]) -> f64,
{
    let mut rng = Pcg32::new(seed, SHUFFLE_STREAM);
    let mut order: Vec<usize> = Vec::with_capacity(rows);
    let mut grad = vec![0.0; params.len()];
    for epoch in 0..epochs {
        order.clear();
        order.extend(0..rows);
        rng.shuffle(&mut order);
        for batch in order.chunks(batch_size) {
            grad.iter_mut().for_each(|g| *g = 0.0);
            let loss = batch_step(batch, params, &mut grad);
            if !loss.is_finite() {
                return Err(Error::Divergence {
                    model,
                    detail: format!("non-finite loss in epoch {epoch}"),
                });
            }
            axpy(params, -learning_rate, &grad);
        }
    }
    if params.iter().any(|p| !p.is_finite()) {
        return Err(Error::Divergence {
            model,
            detail: "non-finite parameters after training".into(),
        });
    }
    Ok(())
}
