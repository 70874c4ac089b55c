//! Design-matrix encoding and fold-safe standardization.
//!
//! Column layout for encoded populations (width 28):
//! 12 sign one-hot columns in sign ordinal order, 12 birth-month one-hot
//! columns (January first), the numeric columns `sleep_hours`, `chai_cups`,
//! `lunar_vibe`, and the binary `mercury_retrograde`.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fmt::format_g;
use crate::lexicon::{ZodiacSign, SIGN_COUNT, TRAIT_COUNT};
use crate::synthpop::Population;

/// Width of an encoded population row.
pub const POPULATION_WIDTH: usize = 28;
const MONTH_OFFSET: usize = SIGN_COUNT;
const NUMERIC_OFFSET: usize = SIGN_COUNT + 12;

/// Stddevs below this are replaced by 1.
const MIN_STDDEV: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ColumnKind {
    OneHot,
    Numeric,
    Binary,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Column {
    pub name: String,
    pub kind: ColumnKind,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureSchema {
    pub columns: Vec<Column>,
}

impl FeatureSchema {
    /// The 28-column population schema.
    pub fn population() -> FeatureSchema {
        let col = |name: String, kind| Column { name, kind };
        let mut columns: Vec<Column> = ZodiacSign::ALL
            .iter()
            .map(|s| col(format!("sign_{}", s.name()), ColumnKind::OneHot))
            .collect();
        columns.extend((1..=12).map(|m| col(format!("month_{m:02}"), ColumnKind::OneHot)));
        for name in ["sleep_hours", "chai_cups", "lunar_vibe"] {
            columns.push(col(name.into(), ColumnKind::Numeric));
        }
        columns.push(col("mercury_retrograde".into(), ColumnKind::Binary));
        FeatureSchema { columns }
    }

    /// `width` numeric columns named `x0`, `x1`, ...; for hand-built data.
    pub fn numeric(width: usize) -> FeatureSchema {
        FeatureSchema {
            columns: (0..width)
                .map(|i| Column {
                    name: format!("x{i}"),
                    kind: ColumnKind::Numeric,
                })
                .collect(),
        }
    }

    pub fn width(&self) -> usize {
        self.columns.len()
    }

    pub fn numeric_columns(&self) -> Vec<usize> {
        self.columns
            .iter()
            .enumerate()
            .filter(|(_, c)| c.kind == ColumnKind::Numeric)
            .map(|(i, _)| i)
            .collect()
    }
}

/// Row-major `n x d` matrix with its schema and the class label of each row.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureMatrix {
    values: Vec<f64>,
    rows: usize,
    schema: FeatureSchema,
    labels: Vec<usize>,
    classes: usize,
}

impl FeatureMatrix {
    pub fn new(values: Vec<f64>, schema: FeatureSchema, labels: Vec<usize>, classes: usize) -> Result<FeatureMatrix> {
        let width = schema.width();
        if width == 0 || values.len() % width != 0 {
            return Err(Error::WidthMismatch {
                expected: width,
                found: values.len(),
            });
        }
        let rows = values.len() / width;
        if labels.len() != rows {
            return Err(Error::LengthMismatch {
                left: rows,
                right: labels.len(),
            });
        }
        if let Some(&class) = labels.iter().find(|&&l| l >= classes) {
            return Err(Error::ClassOutOfRange { class, classes });
        }
        Ok(FeatureMatrix {
            values,
            rows,
            schema,
            labels,
            classes,
        })
    }

    /// Builds an all-numeric matrix from row vectors.
    pub fn from_rows(rows: &[Vec<f64>], labels: Vec<usize>, classes: usize) -> Result<FeatureMatrix> {
        let width = rows.first().map_or(0, Vec::len);
        if let Some(r) = rows.iter().find(|r| r.len() != width) {
            return Err(Error::WidthMismatch {
                expected: width,
                found: r.len(),
            });
        }
        FeatureMatrix::new(rows.concat(), FeatureSchema::numeric(width), labels, classes)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn width(&self) -> usize {
        self.schema.width()
    }

    pub fn classes(&self) -> usize {
        self.classes
    }

    pub fn schema(&self) -> &FeatureSchema {
        &self.schema
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        let d = self.width();
        &self.values[i * d..(i + 1) * d]
    }

    /// Copies the given rows, in the given order.
    pub fn select_rows(&self, indices: &[usize]) -> FeatureMatrix {
        let mut values = Vec::with_capacity(indices.len() * self.width());
        for &i in indices {
            values.extend_from_slice(self.row(i));
        }
        FeatureMatrix {
            values,
            rows: indices.len(),
            schema: self.schema.clone(),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            classes: self.classes,
        }
    }

    /// Same features, different labels.
    pub fn with_labels(&self, labels: Vec<usize>) -> Result<FeatureMatrix> {
        FeatureMatrix::new(self.values.clone(), self.schema.clone(), labels, self.classes)
    }

    /// Writes the matrix as CSV: one header line of column names plus
    /// `label`, values with 9 significant digits.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let header: Vec<&str> = self.schema.columns.iter().map(|c| c.name.as_str()).collect();
        writeln!(out, "{},label", header.join(","))?;
        for i in 0..self.rows {
            for v in self.row(i) {
                write!(out, "{},", format_g(*v, 9))?;
            }
            writeln!(out, "{}", self.labels[i])?;
        }
        Ok(())
    }
}

/// One-hot encodes a population. Labels are trait ids over 100 classes.
pub fn encode(population: &Population) -> Result<FeatureMatrix> {
    if population.is_empty() {
        return Err(Error::EmptyPopulation);
    }
    let mut values = vec![0.0; population.len() * POPULATION_WIDTH];
    for (row, ind) in values.chunks_exact_mut(POPULATION_WIDTH).zip(&population.individuals) {
        row[ind.sign.ordinal()] = 1.0;
        row[MONTH_OFFSET + ind.birth_month as usize - 1] = 1.0;
        row[NUMERIC_OFFSET] = ind.sleep_hours;
        row[NUMERIC_OFFSET + 1] = ind.chai_cups as f64;
        row[NUMERIC_OFFSET + 2] = ind.lunar_vibe;
        row[NUMERIC_OFFSET + 3] = if ind.mercury_retrograde { 1.0 } else { 0.0 };
    }
    FeatureMatrix::new(values, FeatureSchema::population(), population.labels(), TRAIT_COUNT)
}

/// Recovers `(sign, birth_month)` from an encoded population row.
pub fn decode_sign_month(row: &[f64]) -> Option<(ZodiacSign, u8)> {
    let hot = |block: &[f64]| -> Option<usize> {
        let mut ones = block.iter().enumerate().filter(|(_, &v)| v == 1.0);
        let first = ones.next()?.0;
        (ones.next().is_none() && block.iter().all(|&v| v == 0.0 || v == 1.0)).then_some(first)
    };
    let sign = ZodiacSign::from_ordinal(hot(row.get(..SIGN_COUNT)?)?)?;
    let month = hot(row.get(MONTH_OFFSET..NUMERIC_OFFSET)?)? as u8 + 1;
    Some((sign, month))
}

/// Per-column mean and population stddev for the numeric columns.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StandardizationParams {
    pub schema: FeatureSchema,
    pub columns: Vec<usize>,
    pub means: Vec<f64>,
    pub stddevs: Vec<f64>,
}

/// Fits standardization on `row_subset` only. Constant columns get a
/// stddev of 1.
pub fn fit_standardizer(matrix: &FeatureMatrix, row_subset: &[usize]) -> Result<StandardizationParams> {
    if row_subset.is_empty() {
        return Err(Error::Empty("standardizer row subset"));
    }
    let columns = matrix.schema().numeric_columns();
    let n = row_subset.len() as f64;
    let mut means = Vec::with_capacity(columns.len());
    let mut stddevs = Vec::with_capacity(columns.len());
    for &c in &columns {
        let mean = row_subset.iter().map(|&i| matrix.row(i)[c]).sum::<f64>() / n;
        let var = row_subset
            .iter()
            .map(|&i| (matrix.row(i)[c] - mean).powi(2))
            .sum::<f64>()
            / n;
        let sd = var.sqrt();
        means.push(mean);
        stddevs.push(if sd < MIN_STDDEV { 1.0 } else { sd });
    }
    Ok(StandardizationParams {
        schema: matrix.schema().clone(),
        columns,
        means,
        stddevs,
    })
}

/// Returns a standardized copy; non-numeric columns are copied unchanged.
pub fn apply_standardizer(matrix: &FeatureMatrix, params: &StandardizationParams) -> Result<FeatureMatrix> {
    if matrix.schema() != &params.schema {
        return Err(Error::SchemaMismatch(
            "standardizer was fitted on a different schema".into(),
        ));
    }
    let mut out = matrix.clone();
    let d = out.width();
    for row in out.values.chunks_exact_mut(d) {
        for ((&c, &mean), &sd) in params.columns.iter().zip(&params.means).zip(&params.stddevs) {
            row[c] = (row[c] - mean) / sd;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lexicon::{build_default_assignments, build_default_lexicon};
    use crate::synthpop::{generate_population, GenerationConfig, Individual};
    use crate::lexicon::TraitId;

    fn population(n: usize) -> Population {
        let lex = build_default_lexicon();
        let table = build_default_assignments(&lex).unwrap();
        let cfg = GenerationConfig {
            population_size: n,
            ..Default::default()
        };
        generate_population(&cfg, &lex, &table).unwrap()
    }

    fn column_stats(m: &FeatureMatrix, c: usize) -> (f64, f64) {
        let n = m.rows() as f64;
        let mean = (0..m.rows()).map(|i| m.row(i)[c]).sum::<f64>() / n;
        let var = (0..m.rows()).map(|i| (m.row(i)[c] - mean).powi(2)).sum::<f64>() / n;
        (mean, var)
    }

    #[test]
    fn schema_width_is_28() {
        let s = FeatureSchema::population();
        assert_eq!(s.width(), POPULATION_WIDTH);
        assert_eq!(s.numeric_columns(), vec![24, 25, 26]);
        assert_eq!(s.columns[27].kind, ColumnKind::Binary);
    }

    #[test]
    fn aries_retrograde_row() {
        let pop = Population {
            individuals: vec![Individual {
                sign: ZodiacSign::Aries,
                birth_month: 4,
                sleep_hours: 6.5,
                chai_cups: 2,
                mercury_retrograde: true,
                lunar_vibe: 0.25,
                label: TraitId::new(3).unwrap(),
            }],
            config: GenerationConfig::default(),
        };
        let m = encode(&pop).unwrap();
        let mut sign_block = [0.0; 12];
        sign_block[0] = 1.0;
        assert_eq!(&m.row(0)[..12], &sign_block);
        assert_eq!(m.row(0)[27], 1.0);
        assert_eq!(m.row(0)[12 + 3], 1.0);
        assert_eq!(m.labels(), &[3]);
    }

    #[test]
    fn one_hot_blocks_and_decode() {
        let pop = population(500);
        let m = encode(&pop).unwrap();
        assert_eq!(m.rows(), 500);
        for (i, ind) in pop.individuals.iter().enumerate() {
            let row = m.row(i);
            assert_eq!(row[..12].iter().sum::<f64>(), 1.0);
            assert_eq!(row[12..24].iter().sum::<f64>(), 1.0);
            assert_eq!(decode_sign_month(row), Some((ind.sign, ind.birth_month)));
        }
    }

    #[test]
    fn fit_known_column() {
        let m = FeatureMatrix::from_rows(&[vec![1.0, 5.0], vec![2.0, 5.0], vec![3.0, 5.0]], vec![0, 0, 0], 1).unwrap();
        let p = fit_standardizer(&m, &[0, 1, 2]).unwrap();
        assert_eq!(p.means[0], 2.0);
        assert!((p.stddevs[0] - (2.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert_eq!(p.stddevs[1], 1.0);
        assert!(fit_standardizer(&m, &[]).is_err());
    }

    #[test]
    fn identity_params_leave_matrix_unchanged() {
        let m = encode(&population(50)).unwrap();
        let p = StandardizationParams {
            schema: m.schema().clone(),
            columns: vec![24, 25, 26],
            means: vec![0.0; 3],
            stddevs: vec![1.0; 3],
        };
        assert_eq!(apply_standardizer(&m, &p).unwrap(), m);
    }

    #[test]
    fn training_fold_is_standardized_and_one_hot_untouched() {
        let m = encode(&population(1000)).unwrap();
        let train: Vec<usize> = (0..800).collect();
        let test: Vec<usize> = (800..1000).collect();
        let p = fit_standardizer(&m, &train).unwrap();
        let s = apply_standardizer(&m, &p).unwrap();
        let s_train = s.select_rows(&train);
        for c in [24, 25, 26] {
            let (mean, var) = column_stats(&s_train, c);
            assert!(mean.abs() < 1e-9, "{mean}");
            assert!((var - 1.0).abs() < 1e-6, "{var}");
        }
        for i in 0..m.rows() {
            for c in (0..24).chain([27]) {
                assert_eq!(m.row(i)[c].to_bits(), s.row(i)[c].to_bits());
            }
        }
        // test rows were not used, so their mean is generally not zero
        let s_test = s.select_rows(&test);
        let off: f64 = [24, 25, 26].iter().map(|&c| column_stats(&s_test, c).0.abs()).sum();
        assert!(off > 1e-6);
    }

    #[test]
    fn schema_mismatch_rejected() {
        let m = encode(&population(20)).unwrap();
        let other = FeatureMatrix::from_rows(&[vec![1.0], vec![2.0]], vec![0, 0], 1).unwrap();
        let p = fit_standardizer(&other, &[0, 1]).unwrap();
        assert!(matches!(apply_standardizer(&m, &p), Err(Error::SchemaMismatch(_))));
    }

    #[test]
    fn empty_population_rejected() {
        let pop = Population {
            individuals: vec![],
            config: GenerationConfig::default(),
        };
        assert!(encode(&pop).is_err());
    }
}
