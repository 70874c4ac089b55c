//! Experiment configuration: a single JSON document.
//!
//! Every field has a default, so `{}` is a valid configuration and
//! `{"generation": {"signal_probability": 0.0}}` runs the null experiment.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::{ModelKind, TrainConfig};
use crate::synthpop::GenerationConfig;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvaluationConfig {
    pub k_folds: usize,
    pub test_fraction: f64,
    pub permutation_repetitions: usize,
    pub experiment_seed: u64,
}

impl Default for EvaluationConfig {
    fn default() -> Self {
        EvaluationConfig {
            k_folds: 5,
            test_fraction: 0.2,
            permutation_repetitions: 19,
            experiment_seed: 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub generation: GenerationConfig,
    pub models: Vec<TrainConfig>,
    pub evaluation: EvaluationConfig,
    pub output_directory: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            generation: GenerationConfig::default(),
            models: ModelKind::ALL.iter().map(|&k| TrainConfig::new(k, 7)).collect(),
            evaluation: EvaluationConfig::default(),
            output_directory: PathBuf::from("results"),
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        self.generation.validate()?;
        if self.models.is_empty() {
            return Err(Error::invalid("models", "at least one model is required"));
        }
        for (i, m) in self.models.iter().enumerate() {
            m.validate(&format!("models[{i}]"))?;
            // output files are named after the kind
            if self.models[..i].iter().any(|o| o.kind == m.kind) {
                return Err(Error::invalid(format!("models[{i}].kind"), format!("`{}` is listed twice", m.kind)));
            }
        }
        let e = &self.evaluation;
        if e.k_folds < 2 {
            return Err(Error::invalid("evaluation.k_folds", "must be at least 2"));
        }
        if !(e.test_fraction > 0.0 && e.test_fraction < 1.0) {
            return Err(Error::invalid(
                "evaluation.test_fraction",
                format!("must be within (0, 1), got {}", e.test_fraction),
            ));
        }
        if e.permutation_repetitions == 0 {
            return Err(Error::invalid("evaluation.permutation_repetitions", "must be at least 1"));
        }
        let n = self.generation.population_size as f64;
        let n_test = (n * e.test_fraction).floor() as usize;
        let n_train = self.generation.population_size - n_test;
        if n_test == 0 || n_train < e.k_folds {
            return Err(Error::invalid(
                "generation.population_size",
                format!("{} individuals cannot fill a test split and {} folds", self.generation.population_size, e.k_folds),
            ));
        }
        Ok(())
    }

    /// Keeps only the models whose kind is listed (comma separated).
    pub fn restrict_models(&mut self, list: &str) -> Result<()> {
        let mut kinds = Vec::new();
        for name in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            kinds.push(
                ModelKind::from_name(name)
                    .ok_or_else(|| Error::invalid("--models", format!("unknown model `{name}`")))?,
            );
        }
        self.models.retain(|m| kinds.contains(&m.kind));
        if self.models.is_empty() {
            return Err(Error::invalid("--models", format!("no configured model matches `{list}`")));
        }
        Ok(())
    }

    /// Parses and validates a configuration document. Errors carry the
    /// source name, the line and the dotted field path.
    pub fn from_json_str(text: &str, source: &str) -> Result<ExperimentConfig> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let config: ExperimentConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            Error::ConfigParse(format!("{source}:{}: {path}: {inner}", inner.line()))
        })?;
        config.validate().map_err(|e| match e {
            Error::InvalidConfig { ref field, .. } => match key_line(text, field) {
                Some(line) => Error::ConfigParse(format!("{source}:{line}: {e}")),
                None => Error::ConfigParse(format!("{source}: {e}")),
            },
            other => other,
        })?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<ExperimentConfig> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        ExperimentConfig::from_json_str(&text, &path.display().to_string())
    }
}

/// 1-based line of the first `"key"` occurrence for the last segment of a
/// dotted field path.
fn key_line(text: &str, field: &str) -> Option<usize> {
    let last = field.rsplit('.').next()?;
    let last = last.split('[').next()?;
    let needle = format!("\"{last}\"");
    text.lines().position(|l| l.contains(&needle)).map(|i| i + 1)
}
