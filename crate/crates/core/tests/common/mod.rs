#![allow(dead_code)]

use std::path::PathBuf;

use heartnet::data::Sample;
use heartnet::network::Network;

/// Bundled synthetic table with the Cleveland layout (303 rows, six `?` cells, labels 0..4).
pub fn fixture_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/cleveland_synthetic.data")
}

/// The real `processed.cleveland.data` when `HEART_DISEASE_DATA` points at it,
/// otherwise the bundled fixture.
pub fn heart_data_path() -> PathBuf {
    match std::env::var_os("HEART_DISEASE_DATA") {
        Some(p) if !p.is_empty() => PathBuf::from(p),
        _ => fixture_path(),
    }
}

/// Flat parameter vector: per layer, row-major weights then biases.
pub fn flatten(net: &Network) -> Vec<f64> {
    let mut out = Vec::new();
    for l in 0..net.depth() {
        out.extend_from_slice(net.weights(l));
        out.extend_from_slice(net.biases(l));
    }
    out
}

/// Half sum of squared errors, computed with plain nested loops over a flat
/// parameter vector. Shares no code with the library's forward pass.
pub fn half_sse_reference(sizes: &[usize], params: &[f64], input: &[f64], target: &[f64]) -> f64 {
    let mut act = input.to_vec();
    let mut p = 0;
    for pair in sizes.windows(2) {
        let (n_in, n_out) = (pair[0], pair[1]);
        let w = &params[p..p + n_in * n_out];
        let b = &params[p + n_in * n_out..p + n_in * n_out + n_out];
        p += n_in * n_out + n_out;
        let mut next = vec![0.0; n_out];
        for i in 0..n_out {
            let mut z = b[i];
            for j in 0..n_in {
                z += w[i * n_in + j] * act[j];
            }
            next[i] = 1.0 / (1.0 + (-z).exp());
        }
        act = next;
    }
    0.5 * act
        .iter()
        .zip(target)
        .map(|(o, t)| (o - t) * (o - t))
        .sum::<f64>()
}

pub fn xor_samples() -> Vec<Sample> {
    [
        ([0.0, 0.0], 0.0),
        ([0.0, 1.0], 1.0),
        ([1.0, 0.0], 1.0),
        ([1.0, 1.0], 0.0),
    ]
    .iter()
    .map(|(x, t)| Sample {
        input: x.to_vec(),
        target: vec![*t],
    })
    .collect()
}

pub fn bits(values: &[f64]) -> Vec<u64> {
    values.iter().map(|v| v.to_bits()).collect()
}

pub fn network_bits(net: &Network) -> Vec<u64> {
    bits(&flatten(net))
}
