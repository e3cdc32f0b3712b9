//! Ingestion, missing-value handling and seeded partitioning of the heart-disease table.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::schema::{cleveland_schema, AttributeSchema, N_ATTRIBUTES, N_CLASSES};
use crate::{Error, Result};

const MISSING_MARKER: &str = "?";
const MAX_LABEL: u8 = (N_CLASSES - 1) as u8;

/// One instance: 13 attribute values and a class label in `0..=3`.
///
/// Missing cells hold `NaN` until the dataset is imputed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Row {
    pub features: [f64; N_ATTRIBUTES],
    pub label: u8,
}

/// What to do with raw labels above 3 (the public Cleveland file uses 0..4).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LabelPolicy {
    Strict,
    #[default]
    Clamp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ImputePolicy {
    #[serde(rename = "drop")]
    DropRows,
    #[default]
    #[serde(rename = "median")]
    MedianMode,
}

impl FromStr for LabelPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "strict" => Ok(LabelPolicy::Strict),
            "clamp" => Ok(LabelPolicy::Clamp),
            other => Err(Error::Config(format!(
                "unknown label policy {other:?} (expected strict or clamp)"
            ))),
        }
    }
}

impl fmt::Display for LabelPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LabelPolicy::Strict => "strict",
            LabelPolicy::Clamp => "clamp",
        })
    }
}

impl FromStr for ImputePolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "drop" => Ok(ImputePolicy::DropRows),
            "median" => Ok(ImputePolicy::MedianMode),
            other => Err(Error::Config(format!(
                "unknown imputation policy {other:?} (expected drop or median)"
            ))),
        }
    }
}

impl fmt::Display for ImputePolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ImputePolicy::DropRows => "drop",
            ImputePolicy::MedianMode => "median",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    rows: Vec<Row>,
    missing: Vec<[bool; N_ATTRIBUTES]>,
    schema: Vec<AttributeSchema>,
    warnings: Vec<String>,
}

impl Dataset {
    /// Builds a complete dataset from in-memory rows.
    pub fn from_rows(rows: Vec<Row>) -> Result<Self> {
        for (i, row) in rows.iter().enumerate() {
            if row.label > MAX_LABEL {
                return Err(Error::Validation(format!(
                    "row {i}: label {} outside 0..={MAX_LABEL}",
                    row.label
                )));
            }
            if let Some(c) = row.features.iter().position(|v| !v.is_finite()) {
                return Err(Error::Validation(format!(
                    "row {i}: column {c} is not a finite value"
                )));
            }
        }
        let missing = vec![[false; N_ATTRIBUTES]; rows.len()];
        Ok(Dataset {
            rows,
            missing,
            schema: cleveland_schema(),
            warnings: Vec::new(),
        })
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn schema(&self) -> &[AttributeSchema] {
        &self.schema
    }

    /// Per-cell flags for values that were absent in the source file.
    pub fn missing_mask(&self) -> &[[bool; N_ATTRIBUTES]] {
        &self.missing
    }

    /// Notes recorded during loading, such as clamped labels.
    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// True when any cell still lacks a value.
    pub fn has_missing(&self) -> bool {
        self.rows
            .iter()
            .any(|r| r.features.iter().any(|v| v.is_nan()))
    }

    pub fn class_counts(&self) -> [usize; N_CLASSES] {
        let mut counts = [0; N_CLASSES];
        for row in &self.rows {
            counts[row.label as usize] += 1;
        }
        counts
    }

    /// Most frequent label, lowest label on ties. `None` for an empty dataset.
    pub fn majority_class(&self) -> Option<u8> {
        if self.rows.is_empty() {
            return None;
        }
        let counts = self.class_counts();
        let mut best = 0;
        for (label, &count) in counts.iter().enumerate() {
            if count > counts[best] {
                best = label;
            }
        }
        Some(best as u8)
    }

    fn subset(&self, indices: &[usize]) -> Dataset {
        Dataset {
            rows: indices.iter().map(|&i| self.rows[i]).collect(),
            missing: indices.iter().map(|&i| self.missing[i]).collect(),
            schema: self.schema.clone(),
            warnings: self.warnings.clone(),
        }
    }
}

/// Reads a comma-separated heart-disease file.
pub fn load_dataset(path: impl AsRef<Path>, policy: LabelPolicy) -> Result<Dataset> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_dataset(&text, policy)
}

/// Parses heart-disease rows: 14 fields each, `?` marking a missing attribute.
///
/// A leading row whose first field is neither numeric nor `?` is treated as a header.
pub fn parse_dataset(text: &str, policy: LabelPolicy) -> Result<Dataset> {
    let mut rows = Vec::new();
    let mut missing = Vec::new();
    let mut warnings = Vec::new();
    let mut seen_first = false;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if !seen_first {
            seen_first = true;
            if fields[0] != MISSING_MARKER && fields[0].parse::<f64>().is_err() {
                continue;
            }
        }
        if fields.len() != N_ATTRIBUTES + 1 {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected {} fields, got {}", N_ATTRIBUTES + 1, fields.len()),
            });
        }

        let mut features = [f64::NAN; N_ATTRIBUTES];
        let mut absent = [false; N_ATTRIBUTES];
        for (col, field) in fields[..N_ATTRIBUTES].iter().enumerate() {
            if *field == MISSING_MARKER {
                absent[col] = true;
                continue;
            }
            features[col] = parse_number(field, line_no, col)?;
        }

        let label = parse_label(fields[N_ATTRIBUTES], line_no, policy, &mut warnings)?;
        rows.push(Row { features, label });
        missing.push(absent);
    }

    Ok(Dataset {
        rows,
        missing,
        schema: cleveland_schema(),
        warnings,
    })
}

fn parse_number(field: &str, line: usize, col: usize) -> Result<f64> {
    match field.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(Error::Parse {
            line,
            message: format!("column {} has non-numeric value {field:?}", col + 1),
        }),
    }
}

fn parse_label(
    field: &str,
    line: usize,
    policy: LabelPolicy,
    warnings: &mut Vec<String>,
) -> Result<u8> {
    if field == MISSING_MARKER {
        return Err(Error::Parse {
            line,
            message: "class label is missing".into(),
        });
    }
    let value = parse_number(field, line, N_ATTRIBUTES)?;
    if value.fract() != 0.0 {
        return Err(Error::Parse {
            line,
            message: format!("class label {field:?} is not an integer"),
        });
    }
    if value < 0.0 {
        return Err(Error::Validation(format!(
            "line {line}: class label {value} is negative"
        )));
    }
    if value > f64::from(MAX_LABEL) {
        return match policy {
            LabelPolicy::Strict => Err(Error::Validation(format!(
                "line {line}: class label {value} outside 0..={MAX_LABEL}"
            ))),
            LabelPolicy::Clamp => {
                warnings.push(format!(
                    "line {line}: class label {value} clamped to {MAX_LABEL}"
                ));
                Ok(MAX_LABEL)
            }
        };
    }
    Ok(value as u8)
}

/// Resolves missing cells. Rows that were already complete are left untouched.
pub fn impute(dataset: &Dataset, policy: ImputePolicy) -> Result<Dataset> {
    for col in 0..N_ATTRIBUTES {
        if !dataset.rows.is_empty() && dataset.rows.iter().all(|r| r.features[col].is_nan()) {
            return Err(Error::Imputation(format!(
                "column {} ({}) has no present values",
                col + 1,
                dataset.schema[col].name
            )));
        }
    }

    match policy {
        ImputePolicy::DropRows => {
            let keep: Vec<usize> = (0..dataset.len())
                .filter(|&i| dataset.rows[i].features.iter().all(|v| !v.is_nan()))
                .collect();
            Ok(dataset.subset(&keep))
        }
        ImputePolicy::MedianMode => {
            let mut out = dataset.clone();
            for (col, attr) in dataset.schema.iter().enumerate() {
                let present: Vec<f64> = dataset
                    .rows
                    .iter()
                    .map(|r| r.features[col])
                    .filter(|v| !v.is_nan())
                    .collect();
                if present.len() == dataset.len() {
                    continue;
                }
                let fill = if attr.is_categorical() {
                    mode(&present)
                } else {
                    median(&present)
                };
                for row in &mut out.rows {
                    if row.features[col].is_nan() {
                        row.features[col] = fill;
                    }
                }
            }
            Ok(out)
        }
    }
}

fn median(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    }
}

/// Most frequent value, smallest value on ties.
fn mode(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut best = sorted[0];
    let mut best_count = 0;
    for run in sorted.chunk_by(|a, b| a == b) {
        if run.len() > best_count {
            best = run[0];
            best_count = run.len();
        }
    }
    best
}

/// Draws disjoint train and test subsets of the requested sizes with a seeded shuffle.
pub fn split(
    dataset: &Dataset,
    n_train: usize,
    n_test: usize,
    seed: u64,
) -> Result<(Dataset, Dataset)> {
    if n_train + n_test > dataset.len() {
        return Err(Error::Size {
            n_train,
            n_test,
            available: dataset.len(),
        });
    }
    let order = shuffled_indices(dataset.len(), seed);
    let train = dataset.subset(&order[..n_train]);
    let test = dataset.subset(&order[n_train..n_train + n_test]);
    Ok((train, test))
}

fn shuffled_indices(n: usize, seed: u64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    order.shuffle(&mut rng);
    order
}
