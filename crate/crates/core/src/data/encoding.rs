//! Two-neuron class codes and conversion of datasets into network samples.

use super::dataset::Dataset;
use super::scaler::Scaler;
use super::schema::N_CLASSES;
use crate::{Error, Result};

/// Output-neuron threshold; a component at or above it reads as bit 1.
pub const DECISION_THRESHOLD: f64 = 0.5;

/// Maps a label onto its 2-bit binary codeword: 0 -> (0,0), 1 -> (0,1), 2 -> (1,0), 3 -> (1,1).
pub fn encode_class(label: u8) -> Result<[f64; 2]> {
    if usize::from(label) >= N_CLASSES {
        return Err(Error::Validation(format!(
            "class label {label} outside 0..={}",
            N_CLASSES - 1
        )));
    }
    Ok([f64::from((label >> 1) & 1), f64::from(label & 1)])
}

/// Thresholds each output neuron and reads the pair back as a label.
pub fn decode_output(output: [f64; 2]) -> u8 {
    let high = u8::from(output[0] >= DECISION_THRESHOLD);
    let low = u8::from(output[1] >= DECISION_THRESHOLD);
    (high << 1) | low
}

/// Training pair: scaled input vector and encoded target vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub input: Vec<f64>,
    pub target: Vec<f64>,
}

/// Scaled input vector with its true class, for evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledSample {
    pub input: Vec<f64>,
    pub label: u8,
}

/// Scales and class-encodes every row of an imputed dataset.
pub fn training_samples(dataset: &Dataset, scaler: &Scaler) -> Result<Vec<Sample>> {
    dataset
        .rows()
        .iter()
        .map(|row| {
            Ok(Sample {
                input: scaler.scale(&row.features)?.values,
                target: encode_class(row.label)?.to_vec(),
            })
        })
        .collect()
}

pub fn labeled_samples(dataset: &Dataset, scaler: &Scaler) -> Result<Vec<LabeledSample>> {
    dataset
        .rows()
        .iter()
        .map(|row| {
            Ok(LabeledSample {
                input: scaler.scale(&row.features)?.values,
                label: row.label,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binary_codewords() {
        assert_eq!(encode_class(0).unwrap(), [0.0, 0.0]);
        assert_eq!(encode_class(1).unwrap(), [0.0, 1.0]);
        assert_eq!(encode_class(2).unwrap(), [1.0, 0.0]);
        assert_eq!(encode_class(3).unwrap(), [1.0, 1.0]);
        assert!(matches!(encode_class(4), Err(Error::Validation(_))));
    }

    #[test]
    fn threshold_decoding() {
        assert_eq!(decode_output([0.1, 0.9]), 1);
        assert_eq!(decode_output([0.5, 0.5]), 3);
        assert_eq!(decode_output([0.49999, 0.0]), 0);
        assert_eq!(decode_output([0.7, 0.2]), 2);
    }

    #[test]
    fn decode_inverts_encode_on_codewords() {
        for label in 0..4u8 {
            assert_eq!(decode_output(encode_class(label).unwrap()), label);
        }
    }
}
