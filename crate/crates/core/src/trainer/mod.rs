//! Backpropagation training with momentum and an adaptive learning rate.
//!
//! After every epoch the total SSE is compared with that of the last accepted epoch.
//! An improvement raises the rate by `lr_increase`; a rise beyond `max_sse_rise`
//! undoes the epoch (weights and velocity) and lowers the rate by `lr_decrease`;
//! anything in between keeps the rate.

mod history;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::data::Sample;
use crate::network::{check_shapes, Executor, Gradients, Network};
use crate::{Error, Result};

pub use history::{EpochRecord, TrainingHistory, HISTORY_CSV_HEADER};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UpdateMode {
    /// Update after every sample, in a freshly shuffled order each epoch.
    #[default]
    PerSample,
    /// Sum gradients over the whole set, then update once.
    Batch,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub initial_lr: f64,
    pub momentum: f64,
    pub lr_increase: f64,
    pub lr_decrease: f64,
    /// Relative SSE rise tolerated before an epoch is rolled back (0.04 = 4%).
    pub max_sse_rise: f64,
    pub max_epochs: usize,
    /// Training stops once an accepted epoch's SSE falls below this value.
    pub target_sse: f64,
    pub seed: u64,
    pub workers: usize,
    pub update_mode: UpdateMode,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            initial_lr: 0.1,
            momentum: 0.9,
            lr_increase: 1.05,
            lr_decrease: 0.7,
            max_sse_rise: 0.04,
            max_epochs: 5000,
            target_sse: 0.01,
            seed: 0,
            workers: 1,
            update_mode: UpdateMode::PerSample,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        if !(self.initial_lr.is_finite() && self.initial_lr > 0.0) {
            return fail(format!("initial_lr must be > 0, got {}", self.initial_lr));
        }
        if !(0.0..1.0).contains(&self.momentum) {
            return fail(format!("momentum must be in [0, 1), got {}", self.momentum));
        }
        if !(self.lr_increase.is_finite() && self.lr_increase > 1.0) {
            return fail(format!("lr_increase must be > 1, got {}", self.lr_increase));
        }
        if !(self.lr_decrease > 0.0 && self.lr_decrease < 1.0) {
            return fail(format!(
                "lr_decrease must be in (0, 1), got {}",
                self.lr_decrease
            ));
        }
        if !(self.max_sse_rise.is_finite() && self.max_sse_rise >= 0.0) {
            return fail(format!(
                "max_sse_rise must be >= 0, got {}",
                self.max_sse_rise
            ));
        }
        if self.target_sse.is_nan() || self.target_sse < 0.0 {
            return fail(format!("target_sse must be >= 0, got {}", self.target_sse));
        }
        if self.workers == 0 {
            return fail("workers must be at least 1".into());
        }
        Ok(())
    }
}

/// Previous step for every weight and bias.
#[derive(Debug, Clone, PartialEq)]
pub struct Velocity {
    pub weights: Vec<Vec<f64>>,
    pub biases: Vec<Vec<f64>>,
}

impl Velocity {
    pub fn zeros(network: &Network) -> Self {
        let g = Gradients::zeros_like(network);
        Velocity {
            weights: g.weights,
            biases: g.biases,
        }
    }
}

/// Moves every parameter by `-lr * gradient + momentum * previous_step`
/// and stores that step as the new velocity.
pub fn apply_update(
    network: &mut Network,
    gradients: &Gradients,
    velocity: &mut Velocity,
    lr: f64,
    momentum: f64,
) -> Result<()> {
    let shapes = Gradients::zeros_like(network);
    check_shapes(&shapes.weights, &gradients.weights, "gradient weights")?;
    check_shapes(&shapes.biases, &gradients.biases, "gradient biases")?;
    check_shapes(&shapes.weights, &velocity.weights, "velocity weights")?;
    check_shapes(&shapes.biases, &velocity.biases, "velocity biases")?;

    fn step(params: &mut [f64], grad: &[f64], vel: &mut [f64], lr: f64, momentum: f64) {
        for ((p, g), v) in params.iter_mut().zip(grad).zip(vel.iter_mut()) {
            let delta = -lr * g + momentum * *v;
            *p += delta;
            *v = delta;
        }
    }

    for l in 0..network.depth() {
        step(
            network.weights_mut(l),
            &gradients.weights[l],
            &mut velocity.weights[l],
            lr,
            momentum,
        );
        step(
            network.biases_mut(l),
            &gradients.biases[l],
            &mut velocity.biases[l],
            lr,
            momentum,
        );
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LrDecision {
    pub lr: f64,
    pub accept: bool,
}

pub fn adapt_learning_rate(
    prev_sse: f64,
    new_sse: f64,
    lr: f64,
    config: &TrainConfig,
) -> LrDecision {
    if new_sse <= prev_sse {
        LrDecision {
            lr: lr * config.lr_increase,
            accept: true,
        }
    } else if new_sse > prev_sse * (1.0 + config.max_sse_rise) {
        LrDecision {
            lr: lr * config.lr_decrease,
            accept: false,
        }
    } else {
        LrDecision { lr, accept: true }
    }
}

fn epoch_order(n: usize, seed: u64, epoch: usize) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(epoch as u64);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    order
}

fn check_samples(network: &Network, data: &[Sample]) -> Result<()> {
    if data.is_empty() {
        return Err(Error::Validation("training set is empty".into()));
    }
    for s in data {
        if s.input.len() != network.input_size() {
            return Err(Error::shape(
                "sample input",
                network.input_size(),
                s.input.len(),
            ));
        }
        if s.target.len() != network.output_size() {
            return Err(Error::shape(
                "sample target",
                network.output_size(),
                s.target.len(),
            ));
        }
    }
    Ok(())
}

/// One presentation of the training set; returns the epoch's total SSE.
///
/// Each sample's error is measured with the weights in effect when it is presented.
/// `epoch` selects the shuffled presentation order in per-sample mode.
pub fn train_epoch(
    network: &mut Network,
    data: &[Sample],
    velocity: &mut Velocity,
    lr: f64,
    config: &TrainConfig,
    epoch: usize,
    exec: &Executor,
) -> Result<f64> {
    check_samples(network, data)?;
    match config.update_mode {
        UpdateMode::PerSample => {
            let mut total = 0.0;
            for i in epoch_order(data.len(), config.seed, epoch) {
                let sample = &data[i];
                let acts = network.forward(&sample.input, exec)?;
                total += crate::network::sse(acts.output(), &sample.target)?;
                let grads = network.backward(&acts, &sample.target, exec)?;
                apply_update(network, &grads, velocity, lr, config.momentum)?;
            }
            Ok(total)
        }
        UpdateMode::Batch => {
            let net: &Network = network;
            let sequential = Executor::sequential();
            let per_sample = exec.map_ordered(data.len(), |i| -> Result<(f64, Gradients)> {
                let sample = &data[i];
                let acts = net.forward(&sample.input, &sequential)?;
                let err = crate::network::sse(acts.output(), &sample.target)?;
                Ok((err, net.backward(&acts, &sample.target, &sequential)?))
            });
            let mut total = 0.0;
            let mut sum = Gradients::zeros_like(network);
            for item in per_sample {
                let (err, grads) = item?;
                total += err;
                sum.add_assign(&grads)?;
            }
            apply_update(network, &sum, velocity, lr, config.momentum)?;
            Ok(total)
        }
    }
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub network: Network,
    /// Momentum state at the end of the last accepted epoch.
    pub velocity: Velocity,
    pub history: TrainingHistory,
}

/// Runs epochs until an accepted epoch's SSE drops below `target_sse` or
/// `max_epochs` epochs (accepted or not) have been attempted.
pub fn train(network: Network, data: &[Sample], config: &TrainConfig) -> Result<TrainOutcome> {
    config.validate()?;
    let exec = Executor::new(config.workers)?;
    train_with(network, data, config, &exec)
}

pub fn train_with(
    mut network: Network,
    data: &[Sample],
    config: &TrainConfig,
    exec: &Executor,
) -> Result<TrainOutcome> {
    config.validate()?;
    check_samples(&network, data)?;

    let mut velocity = Velocity::zeros(&network);
    let mut lr = config.initial_lr;
    let mut last_accepted: Option<f64> = None;
    let mut history = TrainingHistory::default();

    for epoch in 1..=config.max_epochs {
        let saved = (network.clone(), velocity.clone());
        let epoch_sse = train_epoch(&mut network, data, &mut velocity, lr, config, epoch, exec)?;
        if !epoch_sse.is_finite() || !network.is_finite() {
            return Err(Error::Divergence {
                epoch,
                sse: epoch_sse,
            });
        }

        let decision = match last_accepted {
            None => LrDecision { lr, accept: true },
            Some(prev) => adapt_learning_rate(prev, epoch_sse, lr, config),
        };
        history.push(EpochRecord {
            epoch,
            sse: epoch_sse,
            learning_rate: lr,
            accepted: decision.accept,
        });
        lr = decision.lr;

        if decision.accept {
            last_accepted = Some(epoch_sse);
            if epoch_sse < config.target_sse {
                break;
            }
        } else {
            (network, velocity) = saved;
        }
    }

    Ok(TrainOutcome {
        network,
        velocity,
        history,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_net(w: f64) -> Network {
        Network::from_parts(&[1, 1], vec![vec![w]], vec![vec![0.0]], 0).unwrap()
    }

    fn grads(g: f64) -> Gradients {
        Gradients {
            weights: vec![vec![g]],
            biases: vec![vec![0.0]],
        }
    }

    #[test]
    fn plain_gradient_step() {
        let mut net = tiny_net(1.0);
        let mut vel = Velocity::zeros(&net);
        apply_update(&mut net, &grads(0.25), &mut vel, 1.0, 0.0).unwrap();
        assert_eq!(net.weights(0)[0], 0.75);
        assert_eq!(vel.weights[0][0], -0.25);
    }

    #[test]
    fn momentum_carry_without_gradient() {
        let mut net = tiny_net(1.0);
        let mut vel = Velocity::zeros(&net);
        vel.weights[0][0] = 0.5;
        apply_update(&mut net, &grads(0.0), &mut vel, 0.3, 0.9).unwrap();
        assert_eq!(net.weights(0)[0], 1.0 + 0.9 * 0.5);
    }

    #[test]
    fn momentum_recurrence_unrolled() {
        let g = 0.5;
        let mut net = tiny_net(0.0);
        let mut vel = Velocity::zeros(&net);
        apply_update(&mut net, &grads(g), &mut vel, 1.0, 0.5).unwrap();
        let before = net.weights(0)[0];
        apply_update(&mut net, &grads(g), &mut vel, 1.0, 0.5).unwrap();
        assert_eq!(net.weights(0)[0] - before, -g - 0.5 * g);
    }

    #[test]
    fn update_shape_mismatch() {
        let mut net = Network::new(&[2, 2], 0).unwrap();
        let mut vel = Velocity::zeros(&net);
        let err = apply_update(&mut net, &grads(1.0), &mut vel, 1.0, 0.0).unwrap_err();
        assert!(matches!(err, Error::Shape { .. }));
    }

    #[test]
    fn learning_rate_branches() {
        let cfg = TrainConfig::default();
        let d = adapt_learning_rate(10.0, 9.0, 0.1, &cfg);
        assert!(d.accept);
        assert_eq!(d.lr, 0.1 * 1.05);
        let d = adapt_learning_rate(10.0, 10.5, 0.1, &cfg);
        assert!(!d.accept);
        assert_eq!(d.lr, 0.1 * 0.7);
        let d = adapt_learning_rate(10.0, 10.2, 0.1, &cfg);
        assert!(d.accept);
        assert_eq!(d.lr, 0.1);
    }

    #[test]
    fn config_bounds() {
        assert!(TrainConfig::default().validate().is_ok());
        let bad = [
            TrainConfig {
                initial_lr: 0.0,
                ..Default::default()
            },
            TrainConfig {
                momentum: 1.0,
                ..Default::default()
            },
            TrainConfig {
                lr_increase: 1.0,
                ..Default::default()
            },
            TrainConfig {
                lr_decrease: 1.0,
                ..Default::default()
            },
            TrainConfig {
                max_sse_rise: -0.1,
                ..Default::default()
            },
            TrainConfig {
                target_sse: -1.0,
                ..Default::default()
            },
            TrainConfig {
                workers: 0,
                ..Default::default()
            },
        ];
        for cfg in bad {
            assert!(matches!(cfg.validate(), Err(Error::Config(_))), "{cfg:?}");
        }
    }

    #[test]
    fn empty_training_set_rejected() {
        let net = Network::new(&[2, 1], 0).unwrap();
        let err = train(net, &[], &TrainConfig::default()).unwrap_err();
        assert!(matches!(err, Error::Validation(_)));
    }

    #[test]
    fn single_sample_epoch_reports_first_forward_error() {
        let mut net =
            Network::from_parts(&[2, 1], vec![vec![0.0, 0.0]], vec![vec![0.0]], 0).unwrap();
        let mut vel = Velocity::zeros(&net);
        let data = [Sample {
            input: vec![1.0, 0.5],
            target: vec![1.0],
        }];
        let sse = train_epoch(
            &mut net,
            &data,
            &mut vel,
            0.5,
            &TrainConfig::default(),
            1,
            &Executor::sequential(),
        )
        .unwrap();
        assert_eq!(sse, 0.25);
        assert_ne!(net.weights(0)[0], 0.0);
    }

    #[test]
    fn batch_with_zero_rate_leaves_network() {
        let mut net = Network::new(&[2, 3, 1], 9).unwrap();
        let original = net.clone();
        let mut vel = Velocity::zeros(&net);
        let data = vec![
            Sample {
                input: vec![0.0, 1.0],
                target: vec![1.0],
            },
            Sample {
                input: vec![1.0, 1.0],
                target: vec![0.0],
            },
        ];
        let cfg = TrainConfig {
            update_mode: UpdateMode::Batch,
            momentum: 0.0,
            ..Default::default()
        };
        let got = train_epoch(
            &mut net,
            &data,
            &mut vel,
            0.0,
            &cfg,
            1,
            &Executor::sequential(),
        )
        .unwrap();
        assert_eq!(net, original);
        let exec = Executor::sequential();
        let expected: f64 = data
            .iter()
            .map(|s| {
                let out = original.forward(&s.input, &exec).unwrap();
                crate::network::sse(out.output(), &s.target).unwrap()
            })
            .sum();
        assert_eq!(got, expected);
    }

    #[test]
    fn unreachable_target_runs_every_epoch() {
        let net = Network::new(&[2, 1], 1).unwrap();
        let data = vec![Sample {
            input: vec![0.2, 0.4],
            target: vec![1.0],
        }];
        let cfg = TrainConfig {
            max_epochs: 37,
            target_sse: 0.0,
            ..Default::default()
        };
        let out = train(net, &data, &cfg).unwrap();
        assert_eq!(out.history.len(), 37);
    }

    #[test]
    fn reachable_target_stops_early() {
        let net = Network::new(&[2, 1], 1).unwrap();
        let data = vec![Sample {
            input: vec![0.2, 0.4],
            target: vec![1.0],
        }];
        let cfg = TrainConfig {
            target_sse: 1e9,
            ..Default::default()
        };
        let out = train(net, &data, &cfg).unwrap();
        assert_eq!(out.history.len(), 1);
    }

    #[test]
    fn huge_rate_reports_divergence() {
        let net = Network::new(&[2, 2, 1], 3).unwrap();
        let data = vec![
            Sample {
                input: vec![0.0, 1.0],
                target: vec![1.0],
            },
            Sample {
                input: vec![1.0, 0.0],
                target: vec![0.0],
            },
        ];
        let cfg = TrainConfig {
            initial_lr: 1e308,
            lr_increase: 1e10,
            ..Default::default()
        };
        match train(net, &data, &cfg) {
            Err(Error::Divergence { epoch, .. }) => assert!(epoch >= 1),
            other => panic!("expected divergence, got {other:?}"),
        }
    }
}
