//! The three commands of the `zodiac-lab` tool, usable as library calls.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use log::info;

use crate::chart::accuracy_chart_svg;
use crate::config::ExperimentConfig;
use crate::error::{Error, Result};
use crate::eval::{run_experiment, write_accuracy_summary, write_confusion_csv, EvaluationReport};
use crate::fmt::to_json_fixed;
use crate::lexicon::{build_default_assignments, build_default_lexicon, LexiconDocument};
use crate::models::io::save_model;
use crate::synthpop::{generate_population, write_population_csv};

/// Options of `zodiac-lab run`.
#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    /// Configuration file; defaults apply when absent.
    pub config: Option<PathBuf>,
    /// Output directory; overrides `output_directory` of the config.
    pub out: Option<PathBuf>,
    /// Comma-separated model kinds to keep.
    pub models: Option<String>,
    /// Also write the standardized train/test matrices and the
    /// standardization parameters.
    pub dump_features: bool,
    /// Directory receiving `model_<kind>.json` for each final model.
    pub save_models: Option<PathBuf>,
    /// Replaces both the generation seed and the experiment seed.
    pub seed: Option<u64>,
}

/// Loads the configuration (or the defaults) and applies a seed override.
pub fn load_config(path: Option<&Path>, seed: Option<u64>) -> Result<ExperimentConfig> {
    let mut config = match path {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = seed {
        config.generation.seed = seed;
        config.evaluation.experiment_seed = seed;
    }
    Ok(config)
}

fn write_file(path: &Path, body: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    body(&mut out).and_then(|_| out.flush()).map_err(|e| Error::io(path, e))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    write_file(path, |out| out.write_all(text.as_bytes()))
}

fn json<T: serde::Serialize>(value: &T, what: &'static str) -> Result<String> {
    to_json_fixed(value).map_err(|e| Error::Format {
        what,
        message: e.to_string(),
    })
}

/// `population.csv` → `population.config.json`.
pub fn sidecar_path(csv: &Path) -> PathBuf {
    let stem = csv.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    csv.with_file_name(format!("{stem}.config.json"))
}

/// Writes the population CSV to `out` and its generation settings to the
/// sidecar next to it.
pub fn cmd_generate(config: Option<&Path>, out: &Path, seed: Option<u64>) -> Result<()> {
    let config = load_config(config, seed)?;
    config.generation.validate()?;
    let lexicon = build_default_lexicon();
    let table = build_default_assignments(&lexicon)?;
    let population = generate_population(&config.generation, &lexicon, &table)?;
    write_file(out, |w| write_population_csv(&population, w))?;
    let sidecar = sidecar_path(out);
    write_text(&sidecar, &json(&config.generation, "generation config")?)?;
    info!("wrote {} individuals to {}", population.len(), out.display());
    Ok(())
}

/// Runs the experiment and writes `report.json`, `accuracy_summary.csv`,
/// `confusion_<model>.csv` and `accuracy_comparison.svg`.
pub fn cmd_run(options: &RunOptions) -> Result<EvaluationReport> {
    let mut config = load_config(options.config.as_deref(), options.seed)?;
    if let Some(list) = &options.models {
        config.restrict_models(list)?;
    }
    if let Some(out) = &options.out {
        config.output_directory = out.clone();
    }
    config.validate()?;
    let dir = config.output_directory.clone();
    std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;

    let outcome = run_experiment(&config)?;
    let report = &outcome.report;
    write_text(&dir.join("report.json"), &report.to_json()?)?;
    write_file(&dir.join("accuracy_summary.csv"), |w| {
        write_accuracy_summary(&report.summary_rows(), w)
    })?;
    for m in &report.models {
        write_file(&dir.join(format!("confusion_{}.csv", m.kind)), |w| {
            write_confusion_csv(&m.confusion, w)
        })?;
    }
    write_text(&dir.join("accuracy_comparison.svg"), &accuracy_chart_svg(report))?;

    if options.dump_features {
        write_file(&dir.join("features_train.csv"), |w| outcome.train_features.write_csv(w))?;
        write_file(&dir.join("features_test.csv"), |w| outcome.test_features.write_csv(w))?;
        write_text(&dir.join("standardizer.json"), &json(&outcome.standardizer, "standardizer")?)?;
    }
    if let Some(models_dir) = &options.save_models {
        std::fs::create_dir_all(models_dir).map_err(|e| Error::io(models_dir, e))?;
        for m in &outcome.models {
            save_model(&m.model, &models_dir.join(format!("model_{}.json", m.model.kind())))?;
        }
    }
    info!("wrote results to {}", dir.display());
    Ok(outcome.report)
}

/// Writes the canonical lexicon and sign assignments.
pub fn cmd_export_lexicon(out: &Path) -> Result<()> {
    let lexicon = build_default_lexicon();
    let table = build_default_assignments(&lexicon)?;
    write_text(out, &json(&LexiconDocument::new(&lexicon, &table), "lexicon")?)
}
