//! JSON persistence for trained networks.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Activation, Network};
use crate::{Error, Result};

pub const MODEL_FORMAT_VERSION: u32 = 1;

/// On-disk model layout. Weights are row-major `(out, in)` per layer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub format_version: u32,
    pub layer_sizes: Vec<usize>,
    pub activation: Activation,
    pub weights: Vec<Vec<f64>>,
    pub biases: Vec<Vec<f64>>,
    pub seed: u64,
}

impl From<&Network> for ModelFile {
    fn from(net: &Network) -> Self {
        ModelFile {
            format_version: MODEL_FORMAT_VERSION,
            layer_sizes: net.layer_sizes.clone(),
            activation: net.activation,
            weights: net.layers.iter().map(|l| l.weights.clone()).collect(),
            biases: net.layers.iter().map(|l| l.biases.clone()).collect(),
            seed: net.seed,
        }
    }
}

impl TryFrom<ModelFile> for Network {
    type Error = Error;

    fn try_from(file: ModelFile) -> Result<Self> {
        if file.format_version != MODEL_FORMAT_VERSION {
            return Err(Error::Format(format!(
                "model format_version {} is not supported (expected {MODEL_FORMAT_VERSION})",
                file.format_version
            )));
        }
        let mut net = Network::from_parts(&file.layer_sizes, file.weights, file.biases, file.seed)
            .map_err(|e| Error::Format(format!("invalid model: {e}")))?;
        net.activation = file.activation;
        Ok(net)
    }
}

impl Network {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&ModelFile::from(self)).expect("model serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ModelFile =
            serde_json::from_str(text).map_err(|e| Error::Format(format!("model JSON: {e}")))?;
        Network::try_from(file)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json() + "\n").map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Network::from_json(&text)
    }
}
