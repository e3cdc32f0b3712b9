//! Classification efficiency, confusion matrices and the split-size experiment grid.

mod report;

use serde::{Deserialize, Serialize};

use crate::data::{
    labeled_samples, split, training_samples, Dataset, LabeledSample, Scaler, N_ATTRIBUTES,
    N_CLASSES,
};
use crate::network::{Executor, Network};
use crate::trainer::{train_with, TrainConfig};
use crate::{Error, Result};

pub use report::{
    export_report, load_report_csv, ExperimentReport, ExperimentRow, ReportCsvRow,
    REPORT_CSV_HEADER,
};

/// Rows are true classes, columns predicted classes.
pub type Confusion = [[usize; N_CLASSES]; N_CLASSES];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub n_test: usize,
    pub n_correct: usize,
    /// Percentage of exact 4-class matches.
    pub efficiency: f64,
    pub confusion: Confusion,
}

impl Metrics {
    pub fn from_predictions(pairs: impl IntoIterator<Item = (u8, u8)>) -> Result<Self> {
        let mut confusion = [[0; N_CLASSES]; N_CLASSES];
        for (truth, predicted) in pairs {
            if usize::from(truth) >= N_CLASSES || usize::from(predicted) >= N_CLASSES {
                return Err(Error::Validation(format!(
                    "class pair ({truth}, {predicted}) outside 0..{N_CLASSES}"
                )));
            }
            confusion[usize::from(truth)][usize::from(predicted)] += 1;
        }
        let n_test: usize = confusion.iter().flatten().sum();
        if n_test == 0 {
            return Err(Error::Validation("test set is empty".into()));
        }
        let n_correct = (0..N_CLASSES).map(|c| confusion[c][c]).sum();
        Ok(Metrics {
            n_test,
            n_correct,
            efficiency: 100.0 * n_correct as f64 / n_test as f64,
            confusion,
        })
    }

    /// Percentage agreeing on normal (class 0) versus any abnormal class.
    pub fn binary_efficiency(&self) -> f64 {
        let mut correct = 0;
        for (truth, row) in self.confusion.iter().enumerate() {
            for (predicted, &count) in row.iter().enumerate() {
                if (truth == 0) == (predicted == 0) {
                    correct += count;
                }
            }
        }
        100.0 * correct as f64 / self.n_test as f64
    }

    /// Test rows per true class.
    pub fn class_totals(&self) -> [usize; N_CLASSES] {
        let mut totals = [0; N_CLASSES];
        for (c, row) in self.confusion.iter().enumerate() {
            totals[c] = row.iter().sum();
        }
        totals
    }
}

/// Predicts every test sample and tallies the confusion matrix.
pub fn evaluate(network: &Network, test: &[LabeledSample], exec: &Executor) -> Result<Metrics> {
    if test.is_empty() {
        return Err(Error::Validation("test set is empty".into()));
    }
    let mut pairs = Vec::with_capacity(test.len());
    for sample in test {
        pairs.push((sample.label, network.predict(&sample.input, exec)?));
    }
    Metrics::from_predictions(pairs)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Architecture {
    pub layer_sizes: Vec<usize>,
}

impl Architecture {
    /// Inputs wired straight to the two output neurons.
    pub fn single() -> Self {
        Architecture {
            layer_sizes: vec![N_ATTRIBUTES, 2],
        }
    }

    pub fn multi(hidden: &[usize]) -> Self {
        let mut layer_sizes = vec![N_ATTRIBUTES];
        layer_sizes.extend_from_slice(hidden);
        layer_sizes.push(2);
        Architecture { layer_sizes }
    }

    pub fn is_single(&self) -> bool {
        self.layer_sizes.len() == 2
    }

    pub fn label(&self) -> &'static str {
        if self.is_single() {
            "single"
        } else {
            "multi"
        }
    }
}

/// Train/test sizes from the reference grid.
pub const DEFAULT_SPLITS: [(usize, usize); 4] = [(100, 300), (150, 200), (250, 150), (350, 100)];

/// Default hidden layer for the multi-layer network.
pub const DEFAULT_HIDDEN: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub splits: Vec<(usize, usize)>,
    pub architectures: Vec<Architecture>,
    pub train: TrainConfig,
    /// Recorded in the report; imputation happens before the grid runs.
    pub imputation: String,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            splits: DEFAULT_SPLITS.to_vec(),
            architectures: vec![
                Architecture::single(),
                Architecture::multi(&[DEFAULT_HIDDEN]),
            ],
            train: TrainConfig::default(),
            imputation: "median".into(),
        }
    }
}

/// Fits a requested split into `available` rows.
///
/// Oversized requests are shrunk proportionally (floor-rounded, ratio preserved).
/// Returns the sizes to use and whether they differ from the request.
pub fn fit_split(n_train: usize, n_test: usize, available: usize) -> (usize, usize, bool) {
    let total = n_train + n_test;
    if total <= available {
        return (n_train, n_test, false);
    }
    let scale = |n: usize| (available as u128 * n as u128 / total as u128) as usize;
    (scale(n_train), scale(n_test), true)
}

/// Runs every (split, architecture) cell: fit the scaler on the training part,
/// train from a seeded network, evaluate on the test part.
///
/// Cells run concurrently on `config.train.workers` workers; row order follows the grid.
pub fn run_experiment(dataset: &Dataset, config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.train.validate()?;
    if dataset.has_missing() {
        return Err(Error::Validation(
            "dataset must be imputed before running the experiment".into(),
        ));
    }
    let cells: Vec<(usize, &Architecture)> = (0..config.splits.len())
        .flat_map(|s| config.architectures.iter().map(move |a| (s, a)))
        .collect();

    let exec = Executor::new(config.train.workers)?;
    let rows = exec.map_ordered(cells.len(), |i| {
        let (s, arch) = cells[i];
        let (req_train, req_test) = config.splits[s];
        run_cell(dataset, req_train, req_test, arch, &config.train)
    });
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;

    let substitutions = config
        .splits
        .iter()
        .filter_map(|&(a, b)| {
            let (n_train, n_test, rescaled) = fit_split(a, b, dataset.len());
            rescaled.then(|| {
                format!(
                    "requested {a}/{b} exceeds {} rows; used {n_train}/{n_test}",
                    dataset.len()
                )
            })
        })
        .collect();

    Ok(ExperimentReport {
        rows,
        instance_count: dataset.len(),
        imputation: config.imputation.clone(),
        seed: config.train.seed,
        substitutions,
    })
}

fn run_cell(
    dataset: &Dataset,
    requested_train: usize,
    requested_test: usize,
    arch: &Architecture,
    train_config: &TrainConfig,
) -> Result<ExperimentRow> {
    let (n_train, n_test, rescaled) = fit_split(requested_train, requested_test, dataset.len());
    let (train_set, test_set) = split(dataset, n_train, n_test, train_config.seed)?;
    let scaler = Scaler::fit(&train_set)?;
    let train_samples = training_samples(&train_set, &scaler)?;
    let test_samples = labeled_samples(&test_set, &scaler)?;

    let exec = Executor::sequential();
    let network = Network::new(&arch.layer_sizes, train_config.seed)?;
    let outcome = train_with(network, &train_samples, train_config, &exec)?;
    let metrics = evaluate(&outcome.network, &test_samples, &exec)?;

    let majority = train_set.majority_class().unwrap_or(0);
    let baseline = 100.0
        * test_set
            .rows()
            .iter()
            .filter(|r| r.label == majority)
            .count() as f64
        / test_set.len() as f64;

    Ok(ExperimentRow {
        requested_train,
        requested_test,
        n_train,
        n_test,
        rescaled,
        architecture: arch.label().to_string(),
        layer_sizes: arch.layer_sizes.clone(),
        efficiency: metrics.efficiency,
        binary_efficiency: metrics.binary_efficiency(),
        baseline_efficiency: baseline,
        final_sse: outcome.history.final_sse().unwrap_or(f64::NAN),
        epochs: outcome.history.len(),
        rejected_epochs: outcome.history.rejected(),
        confusion: metrics.confusion,
    })
}
