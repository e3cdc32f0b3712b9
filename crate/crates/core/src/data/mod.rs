//! Heart-disease table handling: schema, ingestion, imputation, scaling, class codes, splits.

mod dataset;
mod encoding;
mod scaler;
mod schema;

pub use dataset::{
    impute, load_dataset, parse_dataset, split, Dataset, ImputePolicy, LabelPolicy, Row,
};
pub use encoding::{
    decode_output, encode_class, labeled_samples, training_samples, LabeledSample, Sample,
    DECISION_THRESHOLD,
};
pub use scaler::{ColumnRange, Scaled, Scaler};
pub use schema::{cleveland_schema, AttributeKind, AttributeSchema, N_ATTRIBUTES, N_CLASSES};
