//! The evaluation report and its flat CSV companions.
//!
//! `report.json` holds every accuracy at full precision (17 significant
//! digits) and the confusion matrices as nested integer arrays.
//! `accuracy_summary.csv` has one row per model; `confusion_<model>.csv`
//! has a `true_class` column followed by one count column per predicted
//! class.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::error::{Error, Result};
use crate::eval::ConfusionMatrix;
use crate::fmt::{format_g, to_json_fixed};
use crate::models::ModelKind;

pub const REPORT_FORMAT_VERSION: u32 = 1;

pub const SUMMARY_HEADER: &str =
    "model,cv_mean,test_acc,shuffled_mean,p_value,uniform_baseline,majority_baseline,bayes_accuracy";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Baselines {
    /// `1 / K`, the expected accuracy of a uniform guesser.
    pub uniform_random_accuracy: f64,
    /// Frequency of the most common class among the test labels.
    pub majority_class_accuracy: f64,
    pub bayes_accuracy: f64,
}

/// The model the confusion analysis focuses on.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BestModel {
    pub kind: ModelKind,
    /// Position in `models`.
    pub index: usize,
    /// Metric used for the choice (highest held-out test accuracy, first
    /// listed model on ties).
    pub criterion: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelReport {
    pub kind: ModelKind,
    pub cv_fold_accuracies: Vec<f64>,
    pub cv_mean_accuracy: f64,
    pub test_accuracy: f64,
    pub shuffled_accuracies: Vec<f64>,
    pub shuffled_mean_accuracy: f64,
    pub permutation_p_value: f64,
    pub confusion: ConfusionMatrix,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvaluationReport {
    pub format_version: u32,
    pub config: ExperimentConfig,
    pub n_train: usize,
    pub n_test: usize,
    pub classes: usize,
    pub baselines: Baselines,
    pub best_model: BestModel,
    pub models: Vec<ModelReport>,
}

impl EvaluationReport {
    pub fn to_json(&self) -> Result<String> {
        to_json_fixed(self).map_err(|e| Error::Format {
            what: "report",
            message: e.to_string(),
        })
    }

    pub fn from_json(text: &str) -> Result<EvaluationReport> {
        let report: EvaluationReport = serde_json::from_str(text).map_err(|e| Error::Format {
            what: "report",
            message: e.to_string(),
        })?;
        if report.format_version != REPORT_FORMAT_VERSION {
            return Err(Error::Format {
                what: "report",
                message: format!("unsupported format_version {}", report.format_version),
            });
        }
        Ok(report)
    }

    pub fn model(&self, kind: ModelKind) -> Option<&ModelReport> {
        self.models.iter().find(|m| m.kind == kind)
    }

    pub fn summary_rows(&self) -> Vec<SummaryRow> {
        self.models
            .iter()
            .map(|m| SummaryRow {
                model: m.kind,
                cv_mean: m.cv_mean_accuracy,
                test_acc: m.test_accuracy,
                shuffled_mean: m.shuffled_mean_accuracy,
                p_value: m.permutation_p_value,
                uniform_baseline: self.baselines.uniform_random_accuracy,
                majority_baseline: self.baselines.majority_class_accuracy,
                bayes_accuracy: self.baselines.bayes_accuracy,
            })
            .collect()
    }
}

/// One line of `accuracy_summary.csv`.
#[derive(Clone, Debug, PartialEq)]
pub struct SummaryRow {
    pub model: ModelKind,
    pub cv_mean: f64,
    pub test_acc: f64,
    pub shuffled_mean: f64,
    pub p_value: f64,
    pub uniform_baseline: f64,
    pub majority_baseline: f64,
    pub bayes_accuracy: f64,
}

impl SummaryRow {
    fn reals(&self) -> [f64; 7] {
        [
            self.cv_mean,
            self.test_acc,
            self.shuffled_mean,
            self.p_value,
            self.uniform_baseline,
            self.majority_baseline,
            self.bayes_accuracy,
        ]
    }
}

pub fn write_accuracy_summary<W: Write>(rows: &[SummaryRow], mut out: W) -> std::io::Result<()> {
    writeln!(out, "{SUMMARY_HEADER}")?;
    for row in rows {
        let reals: Vec<String> = row.reals().iter().map(|&v| format_g(v, 17)).collect();
        writeln!(out, "{},{}", row.model, reals.join(","))?;
    }
    Ok(())
}

fn csv_error(what: &'static str, line: usize, message: impl std::fmt::Display) -> Error {
    Error::Format {
        what,
        message: format!("line {line}: {message}"),
    }
}

pub fn read_accuracy_summary<R: BufRead>(input: R) -> Result<Vec<SummaryRow>> {
    const WHAT: &str = "accuracy summary";
    let mut lines = input.lines();
    let header = lines.next().transpose().map_err(|e| csv_error(WHAT, 1, e))?;
    if header.as_deref() != Some(SUMMARY_HEADER) {
        return Err(csv_error(WHAT, 1, "unexpected header"));
    }
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        let n = i + 2;
        let line = line.map_err(|e| csv_error(WHAT, n, e))?;
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 8 {
            return Err(csv_error(WHAT, n, format!("expected 8 fields, found {}", fields.len())));
        }
        let model = ModelKind::from_name(fields[0]).ok_or_else(|| csv_error(WHAT, n, "unknown model"))?;
        let mut v = [0.0; 7];
        for (slot, text) in v.iter_mut().zip(&fields[1..]) {
            *slot = text.parse().map_err(|e| csv_error(WHAT, n, e))?;
        }
        rows.push(SummaryRow {
            model,
            cv_mean: v[0],
            test_acc: v[1],
            shuffled_mean: v[2],
            p_value: v[3],
            uniform_baseline: v[4],
            majority_baseline: v[5],
            bayes_accuracy: v[6],
        });
    }
    Ok(rows)
}

pub fn write_confusion_csv<W: Write>(matrix: &ConfusionMatrix, mut out: W) -> std::io::Result<()> {
    write!(out, "true_class")?;
    for c in 0..matrix.classes() {
        write!(out, ",{c}")?;
    }
    writeln!(out)?;
    for (t, row) in matrix.counts.iter().enumerate() {
        write!(out, "{t}")?;
        for v in row {
            write!(out, ",{v}")?;
        }
        writeln!(out)?;
    }
    Ok(())
}

/// Reads a matrix written by [`write_confusion_csv`]; supports are the row
/// sums.
pub fn read_confusion_csv<R: BufRead>(input: R) -> Result<ConfusionMatrix> {
    const WHAT: &str = "confusion csv";
    let mut lines = input.lines();
    let header = lines
        .next()
        .transpose()
        .map_err(|e| csv_error(WHAT, 1, e))?
        .ok_or_else(|| csv_error(WHAT, 1, "empty file"))?;
    let fields: Vec<&str> = header.split(',').collect();
    if fields[0] != "true_class" || fields[1..].iter().enumerate().any(|(i, f)| *f != i.to_string()) {
        return Err(csv_error(WHAT, 1, "unexpected header"));
    }
    let classes = fields.len() - 1;
    let mut counts = Vec::with_capacity(classes);
    for (i, line) in lines.enumerate() {
        let n = i + 2;
        let line = line.map_err(|e| csv_error(WHAT, n, e))?;
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != classes + 1 || fields[0] != i.to_string() {
            return Err(csv_error(WHAT, n, "malformed row"));
        }
        let row = fields[1..]
            .iter()
            .map(|f| f.parse::<u64>().map_err(|e| csv_error(WHAT, n, e)))
            .collect::<Result<Vec<u64>>>()?;
        counts.push(row);
    }
    if counts.len() != classes {
        return Err(csv_error(WHAT, counts.len() + 1, format!("expected {classes} rows")));
    }
    let support = counts.iter().map(|r| r.iter().sum()).collect();
    Ok(ConfusionMatrix { counts, support })
}
