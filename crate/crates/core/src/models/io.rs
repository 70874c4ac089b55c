//! Versioned JSON model files.
//!
//! ```json
//! {
//!   "format_version": 1,
//!   "config": { "kind": "logreg", ... },
//!   "input_width": 28,
//!   "classes": 100,
//!   "parameters": { "type": "logreg", "weights": [[...]], "biases": [...] }
//! }
//! ```
//!
//! Logistic regression weights are `K x d`; MLP layers are `w1` (`H x d`),
//! `b1`, `w2` (`K x H`), `b2`; forests are a list of nested node records.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fmt::to_json_fixed;
use crate::models::forest::{ForestModel, Node, Tree};
use crate::models::{LogRegModel, MlpModel, Model, TrainConfig, TrainedModel};

pub const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct ModelFile {
    format_version: u32,
    config: TrainConfig,
    input_width: usize,
    classes: usize,
    parameters: Parameters,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
enum Parameters {
    Logreg {
        weights: Vec<Vec<f64>>,
        biases: Vec<f64>,
    },
    Forest {
        trees: Vec<NodeRecord>,
    },
    Mlp {
        w1: Vec<Vec<f64>>,
        b1: Vec<f64>,
        w2: Vec<Vec<f64>>,
        b2: Vec<f64>,
    },
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum NodeRecord {
    Split {
        feature: usize,
        threshold: f64,
        left: Box<NodeRecord>,
        right: Box<NodeRecord>,
    },
    Leaf {
        distribution: Vec<(usize, f64)>,
    },
}

fn to_record(tree: &Tree, at: usize) -> NodeRecord {
    match &tree.nodes[at] {
        Node::Split {
            feature,
            threshold,
            left,
            right,
        } => NodeRecord::Split {
            feature: *feature,
            threshold: *threshold,
            left: Box::new(to_record(tree, *left)),
            right: Box::new(to_record(tree, *right)),
        },
        Node::Leaf { distribution } => NodeRecord::Leaf {
            distribution: distribution.clone(),
        },
    }
}

// Rebuilds the arena in the same depth-first, left-first order used when
// growing, so a loaded tree equals the trained one.
fn from_record(record: NodeRecord, nodes: &mut Vec<Node>) -> usize {
    let id = nodes.len();
    match record {
        NodeRecord::Leaf { distribution } => nodes.push(Node::Leaf { distribution }),
        NodeRecord::Split {
            feature,
            threshold,
            left,
            right,
        } => {
            nodes.push(Node::Leaf { distribution: Vec::new() });
            let l = from_record(*left, nodes);
            let r = from_record(*right, nodes);
            nodes[id] = Node::Split {
                feature,
                threshold,
                left: l,
                right: r,
            };
        }
    }
    id
}

pub fn model_to_json(model: &TrainedModel) -> Result<String> {
    let parameters = match &model.model {
        Model::LogReg(m) => Parameters::Logreg {
            weights: m.weights(),
            biases: m.biases().to_vec(),
        },
        Model::Forest(f) => Parameters::Forest {
            trees: f.trees.iter().map(|t| to_record(t, 0)).collect(),
        },
        Model::Mlp(m) => Parameters::Mlp {
            w1: m.w1(),
            b1: m.b1().to_vec(),
            w2: m.w2(),
            b2: m.b2().to_vec(),
        },
    };
    let file = ModelFile {
        format_version: MODEL_FORMAT_VERSION,
        config: model.config.clone(),
        input_width: model.input_width(),
        classes: model.classes(),
        parameters,
    };
    to_json_fixed(&file).map_err(|e| Error::Format {
        what: "model",
        message: e.to_string(),
    })
}

pub fn model_from_json(text: &str) -> Result<TrainedModel> {
    let bad = |message: String| Error::Format { what: "model", message };
    let file: ModelFile = serde_json::from_str(text).map_err(|e| bad(e.to_string()))?;
    if file.format_version != MODEL_FORMAT_VERSION {
        return Err(bad(format!("unsupported format_version {}", file.format_version)));
    }
    let shape = || bad("parameter shapes are inconsistent".into());
    let model = match file.parameters {
        Parameters::Logreg { weights, biases } => {
            Model::LogReg(LogRegModel::from_weights(&weights, &biases).ok_or_else(shape)?)
        }
        Parameters::Mlp { w1, b1, w2, b2 } => Model::Mlp(MlpModel::from_layers(&w1, &b1, &w2, &b2).ok_or_else(shape)?),
        Parameters::Forest { trees } => {
            if trees.is_empty() {
                return Err(shape());
            }
            let trees = trees
                .into_iter()
                .map(|r| {
                    let mut nodes = Vec::new();
                    from_record(r, &mut nodes);
                    Tree { nodes }
                })
                .collect();
            Model::Forest(ForestModel::new(trees, file.input_width, file.classes))
        }
    };
    let trained = TrainedModel {
        config: file.config,
        model,
    };
    if trained.input_width() != file.input_width || trained.classes() != file.classes {
        return Err(shape());
    }
    Ok(trained)
}

pub fn save_model(model: &TrainedModel, path: &Path) -> Result<()> {
    std::fs::write(path, model_to_json(model)?).map_err(|e| Error::io(path, e))
}

pub fn load_model(path: &Path) -> Result<TrainedModel> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    model_from_json(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::FeatureMatrix;
    use crate::models::{predict_proba, train, ModelKind};
    use crate::rng::Pcg32;

    #[test]
    fn every_kind_round_trips() {
        let mut rng = Pcg32::new(4, 4);
        let rows: Vec<Vec<f64>> = (0..60).map(|_| (0..3).map(|_| rng.normal(0.0, 1.0)).collect()).collect();
        let labels = (0..60).map(|_| rng.index(4)).collect();
        let x = FeatureMatrix::from_rows(&rows, labels, 4).unwrap();
        for kind in ModelKind::ALL {
            let mut c = TrainConfig::new(kind, 8);
            c.logreg.epochs = 5;
            c.mlp.epochs = 5;
            c.mlp.hidden_units = 4;
            c.forest.n_trees = 3;
            c.forest.features_per_split = 2;
            let m = train(&x, &c).unwrap();
            let json = model_to_json(&m).unwrap();
            let back = model_from_json(&json).unwrap();
            assert_eq!(back, m, "{kind}");
            assert_eq!(predict_proba(&back, &x).unwrap(), predict_proba(&m, &x).unwrap());
        }
    }

    #[test]
    fn version_is_checked() {
        let m = TrainedModel {
            config: TrainConfig::default(),
            model: Model::LogReg(LogRegModel::zeros(2, 2)),
        };
        let json = model_to_json(&m).unwrap().replace("\"format_version\": 1", "\"format_version\": 9");
        assert!(model_from_json(&json).is_err());
    }
}
