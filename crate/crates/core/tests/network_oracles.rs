mod common;

use heartnet::network::{sse, Executor, Network};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const FD_STEP: f64 = 1e-6;
const FD_REL_TOL: f64 = 1e-6;
/// Denominator floor for the relative error, so near-zero gradients are judged
/// against central-difference round-off (about 1e-10) rather than against zero.
const FD_SCALE_FLOOR: f64 = 1e-3;

fn relative_error(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(FD_SCALE_FLOOR)
}

/// Returns the worst relative error between analytic and central-difference gradients.
fn worst_fd_error(net: &Network, input: &[f64], target: &[f64]) -> f64 {
    let exec = Executor::sequential();
    let acts = net.forward(input, &exec).unwrap();
    let grads = net.backward(&acts, target, &exec).unwrap();
    let mut analytic = Vec::new();
    for l in 0..net.depth() {
        analytic.extend_from_slice(&grads.weights[l]);
        analytic.extend_from_slice(&grads.biases[l]);
    }
    let params = common::flatten(net);
    assert_eq!(analytic.len(), params.len());

    let sizes = net.layer_sizes();
    let mut worst: f64 = 0.0;
    for k in 0..params.len() {
        let mut plus = params.clone();
        let mut minus = params.clone();
        plus[k] += FD_STEP;
        minus[k] -= FD_STEP;
        let numeric = (common::half_sse_reference(sizes, &plus, input, target)
            - common::half_sse_reference(sizes, &minus, input, target))
            / (2.0 * FD_STEP);
        worst = worst.max(relative_error(analytic[k], numeric));
    }
    worst
}

#[test]
fn reference_forward_agrees_with_library() {
    let net = Network::new(&[3, 4, 2], 11).unwrap();
    let input = [0.2, 0.9, 0.4];
    let target = [1.0, 0.0];
    let acts = net.forward(&input, &Executor::sequential()).unwrap();
    let lib = 0.5 * sse(acts.output(), &target).unwrap();
    let reference =
        common::half_sse_reference(net.layer_sizes(), &common::flatten(&net), &input, &target);
    assert!((lib - reference).abs() < 1e-15);
}

#[test]
fn gradients_match_finite_differences_seed_11() {
    let net = Network::new(&[3, 4, 2], 11).unwrap();
    assert!(net.parameter_count() <= 30);
    let err = worst_fd_error(&net, &[0.3, 0.8, 0.55], &[0.0, 1.0]);
    assert!(err <= FD_REL_TOL, "worst relative error {err:e}");
}

#[test]
fn gradients_match_finite_differences_three_layer() {
    let net = Network::new(&[2, 3, 2, 1], 4).unwrap();
    let err = worst_fd_error(&net, &[0.7, 0.25], &[1.0]);
    assert!(err <= FD_REL_TOL, "worst relative error {err:e}");
}

#[test]
fn sse_matches_elementwise_recomputation() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..100 {
        let o: [f64; 2] = [rng.random(), rng.random()];
        let t: [f64; 2] = [rng.random(), rng.random()];
        let mut expected = 0.0;
        for i in 0..2 {
            let d = t[i] - o[i];
            expected += d * d;
        }
        assert_eq!(sse(&o, &t).unwrap(), expected);
    }
}

#[test]
fn forward_is_identical_across_worker_counts() {
    let net = Network::new(&[13, 8, 2], 7).unwrap();
    let input: Vec<f64> = (0..13).map(|i| i as f64 / 13.0).collect();
    let one = net.forward(&input, &Executor::sequential()).unwrap();
    let eight = Executor::new(8).unwrap().with_min_parallel_work(0);
    let par = net.forward(&input, &eight).unwrap();
    for (a, b) in one.layers().iter().zip(par.layers()) {
        assert_eq!(common::bits(a), common::bits(b));
    }
    assert_eq!(
        net.predict(&input, &Executor::sequential()).unwrap(),
        net.predict(&input, &eight).unwrap()
    );
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn backward_shapes_mirror_network(
        sizes in prop::collection::vec(1usize..6, 2..=5),
        seed in any::<u64>(),
    ) {
        let net = Network::new(&sizes, seed).unwrap();
        let input = vec![0.5; sizes[0]];
        let target = vec![1.0; *sizes.last().unwrap()];
        let exec = Executor::sequential();
        let acts = net.forward(&input, &exec).unwrap();
        prop_assert!(acts.layers()[1..].iter().flatten().all(|o| *o > 0.0 && *o < 1.0));
        let grads = net.backward(&acts, &target, &exec).unwrap();
        prop_assert_eq!(grads.weights.len(), net.depth());
        for l in 0..net.depth() {
            prop_assert_eq!(grads.weights[l].len(), net.weights(l).len());
            prop_assert_eq!(grads.biases[l].len(), net.biases(l).len());
        }
        prop_assert!(grads.is_finite());
    }

    #[test]
    fn parallel_backward_is_bit_identical(
        hidden in 1usize..12,
        seed in any::<u64>(),
        workers in 2usize..9,
    ) {
        let net = Network::new(&[13, hidden, hidden, 2], seed).unwrap();
        let input: Vec<f64> = (0..13).map(|i| ((i as u64 ^ seed) % 97) as f64 / 97.0).collect();
        let target = [1.0, 0.0];
        let seq = Executor::sequential();
        let par = Executor::new(workers).unwrap().with_min_parallel_work(0);
        let a = net.forward(&input, &seq).unwrap();
        let b = net.forward(&input, &par).unwrap();
        prop_assert_eq!(&a, &b);
        let ga = net.backward(&a, &target, &seq).unwrap();
        let gb = net.backward(&b, &target, &par).unwrap();
        for l in 0..net.depth() {
            prop_assert_eq!(common::bits(&ga.weights[l]), common::bits(&gb.weights[l]));
            prop_assert_eq!(common::bits(&ga.biases[l]), common::bits(&gb.biases[l]));
        }
    }

    #[test]
    fn saturating_weights_never_produce_nan(
        scale in prop_oneof![Just(1e3f64), Just(1e100), Just(1e300)],
        seed in any::<u64>(),
    ) {
        let mut net = Network::new(&[4, 3, 2], seed).unwrap();
        for l in 0..net.depth() {
            net.weights_mut(l).iter_mut().for_each(|w| *w *= scale);
        }
        let acts = net.forward(&[0.1, 0.2, 0.3, 0.4], &Executor::sequential()).unwrap();
        prop_assert!(acts.layers().iter().flatten().all(|v| v.is_finite()));
    }
}
