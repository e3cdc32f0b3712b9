//! Linear min-max scaling of each attribute onto `[0, 1]`.
//!
//! For a column with observed extremes `x_min` and `x_max` the map is
//! `y = (x - x_min) / delta` with `delta = x_max - x_min`, i.e. slope `1 / delta`.
//! Columns with `delta == 0` are degenerate and always map to `0.0`.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use super::dataset::Dataset;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnRange {
    pub name: String,
    pub min: f64,
    pub max: f64,
}

impl ColumnRange {
    pub fn delta(&self) -> f64 {
        self.max - self.min
    }

    pub fn slope(&self) -> f64 {
        1.0 / self.delta()
    }

    pub fn is_degenerate(&self) -> bool {
        self.delta() == 0.0
    }
}

/// Scaled feature vector plus flags for inputs outside the fitted range.
#[derive(Debug, Clone, PartialEq)]
pub struct Scaled {
    pub values: Vec<f64>,
    pub out_of_range: Vec<bool>,
}

impl Scaled {
    pub fn any_out_of_range(&self) -> bool {
        self.out_of_range.iter().any(|f| *f)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scaler {
    columns: Vec<ColumnRange>,
}

impl Scaler {
    /// Fits per-column extremes over an imputed dataset.
    pub fn fit(dataset: &Dataset) -> Result<Self> {
        if dataset.has_missing() {
            return Err(Error::Validation(
                "cannot fit a scaler on a dataset with missing cells".into(),
            ));
        }
        let names: Vec<String> = dataset.schema().iter().map(|a| a.name.clone()).collect();
        let rows: Vec<&[f64]> = dataset.rows().iter().map(|r| &r.features[..]).collect();
        Self::fit_columns(names, &rows)
    }

    /// Fits extremes over arbitrary rows; `names` fixes the column count.
    pub fn fit_columns(names: Vec<String>, rows: &[&[f64]]) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::Validation("cannot fit a scaler on zero rows".into()));
        }
        let mut columns: Vec<ColumnRange> = names
            .into_iter()
            .map(|name| ColumnRange {
                name,
                min: f64::INFINITY,
                max: f64::NEG_INFINITY,
            })
            .collect();
        for row in rows {
            if row.len() != columns.len() {
                return Err(Error::shape("scaler row", columns.len(), row.len()));
            }
            for (range, &x) in columns.iter_mut().zip(row.iter()) {
                if !x.is_finite() {
                    return Err(Error::Validation(format!(
                        "column {} holds a non-finite value",
                        range.name
                    )));
                }
                range.min = range.min.min(x);
                range.max = range.max.max(x);
            }
        }
        Ok(Scaler { columns })
    }

    pub fn from_columns(columns: Vec<ColumnRange>) -> Result<Self> {
        for c in &columns {
            if !(c.min.is_finite() && c.max.is_finite()) || c.max < c.min {
                return Err(Error::Format(format!(
                    "column {} has an invalid range [{}, {}]",
                    c.name, c.min, c.max
                )));
            }
        }
        Ok(Scaler { columns })
    }

    pub fn columns(&self) -> &[ColumnRange] {
        &self.columns
    }

    pub fn degenerate_columns(&self) -> Vec<usize> {
        (0..self.columns.len())
            .filter(|&i| self.columns[i].is_degenerate())
            .collect()
    }

    pub fn scale(&self, features: &[f64]) -> Result<Scaled> {
        if features.len() != self.columns.len() {
            return Err(Error::shape("features", self.columns.len(), features.len()));
        }
        let mut values = Vec::with_capacity(features.len());
        let mut out_of_range = Vec::with_capacity(features.len());
        for (c, &x) in self.columns.iter().zip(features) {
            out_of_range.push(x < c.min || x > c.max);
            values.push(if c.is_degenerate() {
                0.0
            } else {
                (x - c.min) / c.delta()
            });
        }
        Ok(Scaled {
            values,
            out_of_range,
        })
    }

    /// Inverse map. Degenerate columns return their single observed value.
    pub fn unscale(&self, scaled: &[f64]) -> Result<Vec<f64>> {
        if scaled.len() != self.columns.len() {
            return Err(Error::shape(
                "scaled features",
                self.columns.len(),
                scaled.len(),
            ));
        }
        Ok(self
            .columns
            .iter()
            .zip(scaled)
            .map(|(c, &y)| c.min + y * c.delta())
            .collect())
    }

    /// JSON object mapping column name to `{"min": .., "max": ..}`, in column order.
    pub fn to_json(&self) -> Value {
        let mut map = Map::new();
        for c in &self.columns {
            let mut range = Map::new();
            range.insert("min".into(), Value::from(c.min));
            range.insert("max".into(), Value::from(c.max));
            map.insert(c.name.clone(), Value::Object(range));
        }
        Value::Object(map)
    }

    pub fn from_json(value: &Value) -> Result<Self> {
        let map = value
            .as_object()
            .ok_or_else(|| Error::Format("scaler JSON must be an object".into()))?;
        let mut columns = Vec::with_capacity(map.len());
        for (name, range) in map {
            let get = |key: &str| {
                range.get(key).and_then(Value::as_f64).ok_or_else(|| {
                    Error::Format(format!("scaler column {name} lacks a numeric {key:?}"))
                })
            };
            columns.push(ColumnRange {
                name: name.clone(),
                min: get("min")?,
                max: get("max")?,
            });
        }
        Scaler::from_columns(columns)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let text = serde_json::to_string_pretty(&self.to_json())
            .map_err(|e| Error::Format(e.to_string()))?;
        std::fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let value: Value = serde_json::from_str(&text)
            .map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
        Self::from_json(&value)
    }
}
