mod common;

use heartnet::data::{impute, load_dataset, Dataset, ImputePolicy, LabelPolicy, LabeledSample};
use heartnet::eval::{evaluate, fit_split, run_experiment, Architecture, ExperimentConfig};
use heartnet::network::{Executor, Network};
use heartnet::trainer::TrainConfig;

fn fixture() -> Dataset {
    let raw = load_dataset(common::fixture_path(), LabelPolicy::Clamp).unwrap();
    impute(&raw, ImputePolicy::MedianMode).unwrap()
}

/// A [2, 2] network whose outputs reproduce the 2-bit code of the label.
fn codeword_network() -> Network {
    // inputs are the (high, low) bits, copied through steep units
    Network::from_parts(
        &[2, 2],
        vec![vec![40.0, 0.0, 0.0, 40.0]],
        vec![vec![-20.0, -20.0]],
        0,
    )
    .unwrap()
}

fn toy_samples(labels: &[u8]) -> Vec<LabeledSample> {
    labels
        .iter()
        .map(|&l| LabeledSample {
            input: vec![f64::from(l >> 1), f64::from(l & 1)],
            label: l,
        })
        .collect()
}

#[test]
fn perfect_classifier_scores_100_with_diagonal_confusion() {
    let labels = [0, 1, 2, 3, 3, 2, 1, 0, 1];
    let m = evaluate(
        &codeword_network(),
        &toy_samples(&labels),
        &Executor::sequential(),
    )
    .unwrap();
    assert_eq!(m.efficiency, 100.0);
    for (i, row) in m.confusion.iter().enumerate() {
        for (j, count) in row.iter().enumerate() {
            if i != j {
                assert_eq!(*count, 0);
            }
        }
    }
}

#[test]
fn zero_network_predicts_class_3_only() {
    let net = Network::from_parts(&[2, 2], vec![vec![0.0; 4]], vec![vec![0.0; 2]], 0).unwrap();
    let m = evaluate(
        &net,
        &toy_samples(&[0, 1, 2, 0, 1]),
        &Executor::sequential(),
    )
    .unwrap();
    assert_eq!(m.efficiency, 0.0);
    assert_eq!(m.confusion.iter().map(|r| r[3]).sum::<usize>(), 5);
}

#[test]
fn efficiency_matches_brute_force_recount() {
    let net = Network::new(&[2, 3, 2], 8).unwrap();
    let samples: Vec<LabeledSample> = (0..20)
        .map(|i| LabeledSample {
            input: vec![(i % 7) as f64 / 6.0, (i % 5) as f64 / 4.0],
            label: (i % 4) as u8,
        })
        .collect();
    let exec = Executor::sequential();
    let m = evaluate(&net, &samples, &exec).unwrap();

    let mut correct = 0;
    for s in &samples {
        let o = net.forward(&s.input, &exec).unwrap().output().to_vec();
        let bit = |v: f64| u8::from(v >= 0.5);
        if bit(o[0]) * 2 + bit(o[1]) == s.label {
            correct += 1;
        }
    }
    assert_eq!(m.n_correct, correct);
    assert_eq!(m.n_test, 20);
    assert_eq!(m.efficiency, 100.0 * correct as f64 / 20.0);
    assert_eq!(m.confusion.iter().flatten().sum::<usize>(), 20);
}

#[test]
fn rescaled_grid_on_414_rows() {
    assert_eq!(fit_split(100, 300, 414), (100, 300, false));
    assert_eq!(fit_split(150, 200, 414), (150, 200, false));
    assert_eq!(fit_split(250, 150, 414), (250, 150, false));
    assert_eq!(fit_split(350, 100, 414), (322, 92, true));
}

#[test]
fn one_split_two_architectures_gives_two_rows() {
    let cfg = ExperimentConfig {
        splits: vec![(120, 60)],
        train: TrainConfig {
            max_epochs: 30,
            ..Default::default()
        },
        ..Default::default()
    };
    let report = run_experiment(&fixture(), &cfg).unwrap();
    assert_eq!(report.rows.len(), 2);
    assert_eq!(report.rows[0].architecture, "single");
    assert_eq!(report.rows[1].architecture, "multi");
    assert!(report.substitutions.is_empty());
    assert_eq!(report.instance_count, 303);
    for row in &report.rows {
        assert_eq!((row.n_train, row.n_test), (120, 60));
        assert_eq!(row.confusion.iter().flatten().sum::<usize>(), 60);
        assert!(row.epochs <= 30);
    }
}

#[test]
fn default_grid_is_rescaled_to_the_fixture() {
    let cfg = ExperimentConfig {
        architectures: vec![Architecture::single()],
        train: TrainConfig {
            max_epochs: 5,
            ..Default::default()
        },
        ..Default::default()
    };
    let report = run_experiment(&fixture(), &cfg).unwrap();
    let sizes: Vec<(usize, usize)> = report.rows.iter().map(|r| (r.n_train, r.n_test)).collect();
    assert_eq!(sizes, vec![(75, 227), (129, 173), (189, 113), (235, 67)]);
    assert_eq!(report.substitutions.len(), 4);
}

#[test]
fn experiment_is_worker_independent() {
    let base = ExperimentConfig {
        splits: vec![(100, 50), (200, 100)],
        architectures: vec![Architecture::single(), Architecture::multi(&[4])],
        train: TrainConfig {
            max_epochs: 20,
            ..Default::default()
        },
        ..Default::default()
    };
    let mut par = base.clone();
    par.train.workers = 4;
    let ds = fixture();
    assert_eq!(
        run_experiment(&ds, &base).unwrap(),
        run_experiment(&ds, &par).unwrap()
    );
}

#[test]
fn unimputed_dataset_is_rejected() {
    let raw = load_dataset(common::fixture_path(), LabelPolicy::Clamp).unwrap();
    assert!(raw.has_missing());
    assert!(run_experiment(&raw, &ExperimentConfig::default()).is_err());
}
