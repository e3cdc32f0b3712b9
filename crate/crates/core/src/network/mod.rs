//! Dense feedforward network with logistic units, trained by error back-propagation.
//!
//! Weights of each non-input layer are stored row-major with shape
//! `(out_neurons, in_neurons)`. Gradients are those of `SSE / 2`, so the output
//! delta is `(o - t) * o * (1 - o)`.

mod executor;
mod model;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::data::decode_output;
use crate::{Error, Result};

pub use executor::{Executor, DEFAULT_MIN_PARALLEL_WORK};
pub use model::{ModelFile, MODEL_FORMAT_VERSION};

/// Default cap on the total number of layers (input + hidden + output).
pub const DEFAULT_MAX_LAYERS: usize = 5;

/// Half-width of the uniform initial weight distribution.
pub const INIT_RANGE: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Activation {
    #[default]
    Logistic,
}

/// Logistic sigmoid `1 / (1 + e^-x)`, evaluated without overflow for any finite `x`.
pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Sum of squared errors `sum (t_i - o_i)^2`.
pub fn sse(output: &[f64], target: &[f64]) -> Result<f64> {
    if output.len() != target.len() {
        return Err(Error::shape("target", output.len(), target.len()));
    }
    Ok(output
        .iter()
        .zip(target)
        .map(|(o, t)| (t - o) * (t - o))
        .sum())
}

#[derive(Debug, Clone, PartialEq)]
struct Dense {
    inputs: usize,
    outputs: usize,
    weights: Vec<f64>,
    biases: Vec<f64>,
}

impl Dense {
    fn row(&self, neuron: usize) -> &[f64] {
        &self.weights[neuron * self.inputs..(neuron + 1) * self.inputs]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    layer_sizes: Vec<usize>,
    layers: Vec<Dense>,
    activation: Activation,
    seed: u64,
}

/// Outputs of every layer for one sample; entry 0 is the input itself.
#[derive(Debug, Clone, PartialEq)]
pub struct Activations {
    layers: Vec<Vec<f64>>,
}

impl Activations {
    pub fn layers(&self) -> &[Vec<f64>] {
        &self.layers
    }

    pub fn input(&self) -> &[f64] {
        &self.layers[0]
    }

    pub fn output(&self) -> &[f64] {
        self.layers.last().map(Vec::as_slice).unwrap_or(&[])
    }
}

/// Gradients of `SSE / 2` for every weight and bias.
///
/// A neuron's bias gradient equals its back-propagated delta.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub weights: Vec<Vec<f64>>,
    pub biases: Vec<Vec<f64>>,
}

impl Gradients {
    pub fn zeros_like(network: &Network) -> Self {
        Gradients {
            weights: network
                .layers
                .iter()
                .map(|l| vec![0.0; l.weights.len()])
                .collect(),
            biases: network
                .layers
                .iter()
                .map(|l| vec![0.0; l.biases.len()])
                .collect(),
        }
    }

    pub fn deltas(&self) -> &[Vec<f64>] {
        &self.biases
    }

    pub fn add_assign(&mut self, other: &Gradients) -> Result<()> {
        check_shapes(&self.weights, &other.weights, "gradient weights")?;
        check_shapes(&self.biases, &other.biases, "gradient biases")?;
        for (a, b) in self.weights.iter_mut().zip(&other.weights) {
            a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
        }
        for (a, b) in self.biases.iter_mut().zip(&other.biases) {
            a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
        }
        Ok(())
    }

    pub fn is_finite(&self) -> bool {
        self.weights
            .iter()
            .chain(&self.biases)
            .all(|v| v.iter().all(|x| x.is_finite()))
    }
}

pub(crate) fn check_shapes(a: &[Vec<f64>], b: &[Vec<f64>], what: &'static str) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::shape(what, a.len(), b.len()));
    }
    for (x, y) in a.iter().zip(b) {
        if x.len() != y.len() {
            return Err(Error::shape(what, x.len(), y.len()));
        }
    }
    Ok(())
}

fn validate_sizes(layer_sizes: &[usize], max_layers: usize) -> Result<()> {
    if layer_sizes.len() < 2 {
        return Err(Error::Construction(format!(
            "need at least an input and an output layer, got {} layer(s)",
            layer_sizes.len()
        )));
    }
    if layer_sizes.len() > max_layers {
        return Err(Error::Construction(format!(
            "{} layers exceed the cap of {max_layers}",
            layer_sizes.len()
        )));
    }
    if let Some(pos) = layer_sizes.iter().position(|&n| n == 0) {
        return Err(Error::Construction(format!("layer {pos} has zero neurons")));
    }
    Ok(())
}

impl Network {
    /// Random network with weights and biases uniform in `[-0.5, 0.5]`.
    pub fn new(layer_sizes: &[usize], seed: u64) -> Result<Self> {
        Self::with_max_layers(layer_sizes, seed, DEFAULT_MAX_LAYERS)
    }

    pub fn with_max_layers(layer_sizes: &[usize], seed: u64, max_layers: usize) -> Result<Self> {
        validate_sizes(layer_sizes, max_layers)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let layers = layer_sizes
            .windows(2)
            .map(|pair| {
                let (inputs, outputs) = (pair[0], pair[1]);
                let weights = (0..inputs * outputs)
                    .map(|_| rng.random_range(-INIT_RANGE..=INIT_RANGE))
                    .collect();
                let biases = (0..outputs)
                    .map(|_| rng.random_range(-INIT_RANGE..=INIT_RANGE))
                    .collect();
                Dense {
                    inputs,
                    outputs,
                    weights,
                    biases,
                }
            })
            .collect();
        Ok(Network {
            layer_sizes: layer_sizes.to_vec(),
            layers,
            activation: Activation::Logistic,
            seed,
        })
    }

    /// Network with explicit parameters; `weights[l]` is row-major `(out, in)`.
    pub fn from_parts(
        layer_sizes: &[usize],
        weights: Vec<Vec<f64>>,
        biases: Vec<Vec<f64>>,
        seed: u64,
    ) -> Result<Self> {
        validate_sizes(layer_sizes, usize::MAX)?;
        let n_layers = layer_sizes.len() - 1;
        if weights.len() != n_layers {
            return Err(Error::shape("weight layers", n_layers, weights.len()));
        }
        if biases.len() != n_layers {
            return Err(Error::shape("bias layers", n_layers, biases.len()));
        }
        let mut layers = Vec::with_capacity(n_layers);
        for (l, (w, b)) in weights.into_iter().zip(biases).enumerate() {
            let (inputs, outputs) = (layer_sizes[l], layer_sizes[l + 1]);
            if w.len() != inputs * outputs {
                return Err(Error::shape("layer weights", inputs * outputs, w.len()));
            }
            if b.len() != outputs {
                return Err(Error::shape("layer biases", outputs, b.len()));
            }
            if !w.iter().chain(&b).all(|x| x.is_finite()) {
                return Err(Error::Construction(format!(
                    "layer {} holds a non-finite parameter",
                    l + 1
                )));
            }
            layers.push(Dense {
                inputs,
                outputs,
                weights: w,
                biases: b,
            });
        }
        Ok(Network {
            layer_sizes: layer_sizes.to_vec(),
            layers,
            activation: Activation::Logistic,
            seed,
        })
    }

    pub fn layer_sizes(&self) -> &[usize] {
        &self.layer_sizes
    }

    pub fn activation(&self) -> Activation {
        self.activation
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn input_size(&self) -> usize {
        self.layer_sizes[0]
    }

    pub fn output_size(&self) -> usize {
        *self.layer_sizes.last().unwrap()
    }

    /// Number of non-input layers.
    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    pub fn parameter_count(&self) -> usize {
        self.layers
            .iter()
            .map(|l| l.weights.len() + l.biases.len())
            .sum()
    }

    pub fn weights(&self, layer: usize) -> &[f64] {
        &self.layers[layer].weights
    }

    pub fn biases(&self, layer: usize) -> &[f64] {
        &self.layers[layer].biases
    }

    pub fn weights_mut(&mut self, layer: usize) -> &mut [f64] {
        &mut self.layers[layer].weights
    }

    pub fn biases_mut(&mut self, layer: usize) -> &mut [f64] {
        &mut self.layers[layer].biases
    }

    pub fn is_finite(&self) -> bool {
        self.layers
            .iter()
            .all(|l| l.weights.iter().chain(&l.biases).all(|x| x.is_finite()))
    }

    /// Forward sweep: every neuron outputs `sigmoid(bias + sum w * previous)`.
    ///
    /// Layers are evaluated in order; neurons within a layer may run on different workers.
    pub fn forward(&self, input: &[f64], exec: &Executor) -> Result<Activations> {
        if input.len() != self.input_size() {
            return Err(Error::shape("input", self.input_size(), input.len()));
        }
        let mut layers = Vec::with_capacity(self.layers.len() + 1);
        layers.push(input.to_vec());
        for dense in &self.layers {
            let prev = layers.last().unwrap();
            let mut out = vec![0.0; dense.outputs];
            exec.fill_neurons(&mut out, dense.inputs, |i| {
                let mut sum = dense.biases[i];
                for (w, x) in dense.row(i).iter().zip(prev) {
                    sum += w * x;
                }
                sigmoid(sum)
            });
            layers.push(out);
        }
        Ok(Activations { layers })
    }

    /// Back-propagates `output - target` through the network.
    pub fn backward(
        &self,
        activations: &Activations,
        target: &[f64],
        exec: &Executor,
    ) -> Result<Gradients> {
        let acts = &activations.layers;
        if acts.len() != self.layer_sizes.len() {
            return Err(Error::shape(
                "activation layers",
                self.layer_sizes.len(),
                acts.len(),
            ));
        }
        for (a, &n) in acts.iter().zip(&self.layer_sizes) {
            if a.len() != n {
                return Err(Error::shape("activation layer", n, a.len()));
            }
        }
        if target.len() != self.output_size() {
            return Err(Error::shape("target", self.output_size(), target.len()));
        }

        let depth = self.layers.len();
        let mut deltas: Vec<Vec<f64>> = vec![Vec::new(); depth];

        let output = &acts[depth];
        deltas[depth - 1] = output
            .iter()
            .zip(target)
            .map(|(o, t)| (o - t) * o * (1.0 - o))
            .collect();

        for l in (1..depth).rev() {
            let next = &self.layers[l];
            let next_delta = &deltas[l];
            let a = &acts[l];
            let mut delta = vec![0.0; next.inputs];
            exec.fill_neurons(&mut delta, next.outputs, |j| {
                let mut sum = 0.0;
                for (i, d) in next_delta.iter().enumerate() {
                    sum += next.weights[i * next.inputs + j] * d;
                }
                sum * a[j] * (1.0 - a[j])
            });
            deltas[l - 1] = delta;
        }

        let mut weights = Vec::with_capacity(depth);
        for (l, dense) in self.layers.iter().enumerate() {
            let prev = &acts[l];
            let delta = &deltas[l];
            let mut grad = vec![0.0; dense.weights.len()];
            exec.fill_rows(&mut grad, dense.inputs, |i, row| {
                for (g, x) in row.iter_mut().zip(prev) {
                    *g = delta[i] * x;
                }
            });
            weights.push(grad);
        }

        Ok(Gradients {
            weights,
            biases: deltas,
        })
    }

    /// Class label read off the two output neurons.
    pub fn predict(&self, input: &[f64], exec: &Executor) -> Result<u8> {
        if self.output_size() != 2 {
            return Err(Error::shape("output neurons", 2, self.output_size()));
        }
        let acts = self.forward(input, exec)?;
        let out = acts.output();
        Ok(decode_output([out[0], out[1]]))
    }
}
