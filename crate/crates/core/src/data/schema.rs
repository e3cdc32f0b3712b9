//! Column layout of the Cleveland heart-disease table.

use serde::{Deserialize, Serialize};

/// Number of predictive attributes per row.
pub const N_ATTRIBUTES: usize = 13;

/// Number of class labels after clamping (0 = normal .. 3 = end of life).
pub const N_CLASSES: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AttributeKind {
    Continuous,
    Categorical,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttributeSchema {
    pub name: String,
    pub kind: AttributeKind,
    /// Permitted codes for categorical attributes, `None` for continuous ones.
    pub allowed_values: Option<Vec<f64>>,
    pub column_index: usize,
}

impl AttributeSchema {
    pub fn is_categorical(&self) -> bool {
        self.kind == AttributeKind::Categorical
    }
}

const LAYOUT: [(&str, Option<&[f64]>); N_ATTRIBUTES] = [
    ("age", None),
    ("sex", Some(&[0.0, 1.0])),
    ("cp", Some(&[1.0, 2.0, 3.0, 4.0])),
    ("trestbps", None),
    ("chol", None),
    ("fbs", Some(&[0.0, 1.0])),
    ("restecg", Some(&[0.0, 1.0, 2.0])),
    ("thalach", None),
    ("exang", Some(&[0.0, 1.0])),
    ("oldpeak", None),
    ("slope", Some(&[1.0, 2.0, 3.0])),
    // Listed as continuous in the source attribute table even though it counts vessels 0-3.
    ("ca", None),
    ("thal", Some(&[3.0, 6.0, 7.0])),
];

/// The 13 attributes in file order: Age .. Thal.
pub fn cleveland_schema() -> Vec<AttributeSchema> {
    LAYOUT
        .iter()
        .enumerate()
        .map(|(column_index, (name, allowed))| AttributeSchema {
            name: (*name).to_string(),
            kind: if allowed.is_some() {
                AttributeKind::Categorical
            } else {
                AttributeKind::Continuous
            },
            allowed_values: allowed.map(|v| v.to_vec()),
            column_index,
        })
        .collect()
}
