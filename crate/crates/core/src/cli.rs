//! Command-line front end: `scale`, `train`, `evaluate`, `experiment`, `benchmark`.
//!
//! Settings come from an optional flat JSON config (`--config`) with command-line
//! flags taking precedence. The merged config is written to the output directory
//! as `config.json` and can be fed back through `--config`.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::data::{
    impute, labeled_samples, load_dataset, training_samples, Dataset, ImputePolicy, LabelPolicy,
    Scaler, N_ATTRIBUTES,
};
use crate::eval::{
    evaluate, export_report, run_experiment, Architecture, ExperimentConfig, DEFAULT_HIDDEN,
    DEFAULT_SPLITS,
};
use crate::network::{Executor, Network, DEFAULT_MAX_LAYERS};
use crate::trainer::{train_with, TrainConfig, UpdateMode};
use crate::{Error, Result};

pub const CONFIG_FILE: &str = "config.json";
pub const MODEL_FILE: &str = "model.json";
pub const SCALER_FILE: &str = "scaler.json";
pub const HISTORY_FILE: &str = "history.csv";
pub const REPORT_CSV_FILE: &str = "report.csv";
pub const REPORT_JSON_FILE: &str = "report.json";
pub const METRICS_FILE: &str = "metrics.json";
pub const SCALED_FILE: &str = "scaled.csv";

#[derive(Debug, Parser)]
#[command(
    name = "heartnet",
    version,
    about = "Heart-disease classification with a backpropagation network"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit the min-max scaler and write scaled rows.
    Scale(CommonArgs),
    /// Train a network on the whole data file.
    Train(CommonArgs),
    /// Score a saved model on a data file.
    Evaluate(EvaluateArgs),
    /// Run the single- vs multi-layer grid over train/test split sizes.
    Experiment(CommonArgs),
    /// Time forward and backward passes for several worker counts.
    Benchmark(BenchmarkArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// Flat JSON config file; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub data: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub workers: Option<usize>,
    /// Layer sizes, e.g. 13,8,2.
    #[arg(long, value_delimiter = ',')]
    pub layers: Option<Vec<usize>>,
    #[arg(long, value_parser = ["drop", "median"])]
    pub impute: Option<String>,
    #[arg(long, value_parser = ["strict", "clamp"])]
    pub labels: Option<String>,
    #[arg(long)]
    pub max_epochs: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct EvaluateArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Defaults to <out>/model.json.
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// Defaults to <out>/scaler.json.
    #[arg(long)]
    pub scaler: Option<PathBuf>,
    /// Also report normal-vs-abnormal efficiency.
    #[arg(long)]
    pub binary: bool,
    /// Write metrics as JSON to <out>/metrics.json.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Clone, Args)]
pub struct BenchmarkArgs {
    #[arg(long, default_value_t = 256)]
    pub width: usize,
    /// Worker counts to compare; the first is the speedup reference.
    #[arg(long, value_delimiter = ',', default_value = "1,2,4,8")]
    pub workers_list: Vec<usize>,
    #[arg(long, default_value_t = 5)]
    pub repetitions: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

/// Every run setting, as accepted in `--config` and echoed to `config.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub data_path: Option<PathBuf>,
    pub impute: ImputePolicy,
    pub labels: LabelPolicy,
    pub layers: Vec<usize>,
    pub max_layers: usize,
    pub out_dir: PathBuf,
    pub workers: usize,
    pub seed: u64,
    pub initial_lr: f64,
    pub momentum: f64,
    pub lr_increase: f64,
    pub lr_decrease: f64,
    pub max_sse_rise: f64,
    pub max_epochs: usize,
    pub target_sse: f64,
    pub update_mode: UpdateMode,
    /// Train/test sizes for `experiment`.
    pub splits: Vec<(usize, usize)>,
    /// Architectures for `experiment`; defaults to single-layer plus `layers`.
    pub architectures: Option<Vec<Vec<usize>>>,
}

pub fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

impl Default for RunConfig {
    fn default() -> Self {
        let t = TrainConfig::default();
        RunConfig {
            data_path: None,
            impute: ImputePolicy::default(),
            labels: LabelPolicy::default(),
            layers: vec![N_ATTRIBUTES, DEFAULT_HIDDEN, 2],
            max_layers: DEFAULT_MAX_LAYERS,
            out_dir: PathBuf::from("out"),
            workers: default_workers(),
            seed: t.seed,
            initial_lr: t.initial_lr,
            momentum: t.momentum,
            lr_increase: t.lr_increase,
            lr_decrease: t.lr_decrease,
            max_sse_rise: t.max_sse_rise,
            max_epochs: t.max_epochs,
            target_sse: t.target_sse,
            update_mode: t.update_mode,
            splits: DEFAULT_SPLITS.to_vec(),
            architectures: None,
        }
    }
}

impl RunConfig {
    /// Loads `--config` (if any) and applies flag overrides.
    pub fn resolve(args: &CommonArgs) -> Result<Self> {
        let mut cfg = match &args.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
                serde_json::from_str(&text)
                    .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?
            }
            None => RunConfig::default(),
        };
        if let Some(v) = &args.data {
            cfg.data_path = Some(v.clone());
        }
        if let Some(v) = &args.out {
            cfg.out_dir = v.clone();
        }
        if let Some(v) = args.seed {
            cfg.seed = v;
        }
        if let Some(v) = args.workers {
            cfg.workers = v;
        }
        if let Some(v) = &args.layers {
            cfg.layers = v.clone();
        }
        if let Some(v) = &args.impute {
            cfg.impute = v.parse()?;
        }
        if let Some(v) = &args.labels {
            cfg.labels = v.parse()?;
        }
        if let Some(v) = args.max_epochs {
            cfg.max_epochs = v;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.train_config().validate()?;
        check_architecture(&self.layers, self.max_layers)?;
        for arch in self.architectures() {
            check_architecture(&arch.layer_sizes, self.max_layers)?;
        }
        Ok(())
    }

    pub fn train_config(&self) -> TrainConfig {
        TrainConfig {
            initial_lr: self.initial_lr,
            momentum: self.momentum,
            lr_increase: self.lr_increase,
            lr_decrease: self.lr_decrease,
            max_sse_rise: self.max_sse_rise,
            max_epochs: self.max_epochs,
            target_sse: self.target_sse,
            seed: self.seed,
            workers: self.workers,
            update_mode: self.update_mode,
        }
    }

    pub fn architectures(&self) -> Vec<Architecture> {
        match &self.architectures {
            Some(list) => list
                .iter()
                .map(|l| Architecture {
                    layer_sizes: l.clone(),
                })
                .collect(),
            None => vec![
                Architecture::single(),
                Architecture {
                    layer_sizes: self.layers.clone(),
                },
            ],
        }
    }

    fn data_path(&self) -> Result<&Path> {
        let path = self
            .data_path
            .as_deref()
            .ok_or_else(|| Error::Config("no data file given (use --data or data_path)".into()))?;
        if !path.is_file() {
            return Err(Error::io(
                path,
                std::io::Error::new(std::io::ErrorKind::NotFound, "data file not found"),
            ));
        }
        Ok(path)
    }

    fn prepare_out_dir(&self) -> Result<()> {
        std::fs::create_dir_all(&self.out_dir).map_err(|e| Error::io(&self.out_dir, e))
    }

    fn echo(&self) -> Result<()> {
        let text = serde_json::to_string_pretty(self).expect("config serializes");
        write_file(&self.out_dir.join(CONFIG_FILE), &(text + "\n"))
    }

    fn load_data(&self) -> Result<Dataset> {
        let raw = load_dataset(self.data_path()?, self.labels)?;
        match raw.warnings() {
            [] => {}
            [only] => eprintln!("warning: {only}"),
            [first, rest @ ..] => {
                eprintln!("warning: {first} (and {} more like it)", rest.len())
            }
        }
        impute(&raw, self.impute)
    }
}

fn check_architecture(layers: &[usize], max_layers: usize) -> Result<()> {
    if layers.first() != Some(&N_ATTRIBUTES) || layers.last() != Some(&2) {
        return Err(Error::Config(format!(
            "layers {layers:?} must start with {N_ATTRIBUTES} inputs and end with 2 outputs"
        )));
    }
    if layers.len() > max_layers {
        return Err(Error::Config(format!(
            "{} layers exceed max_layers = {max_layers}",
            layers.len()
        )));
    }
    if layers.contains(&0) {
        return Err(Error::Config(format!(
            "layers {layers:?} contain an empty layer"
        )));
    }
    Ok(())
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| Error::io(path, e))
}

/// Runs one parsed command, printing results to `out`.
pub fn run(cli: Cli, out: &mut dyn std::io::Write) -> Result<()> {
    match cli.command {
        Command::Scale(args) => cmd_scale(&RunConfig::resolve(&args)?, out),
        Command::Train(args) => cmd_train(&RunConfig::resolve(&args)?, out),
        Command::Evaluate(args) => cmd_evaluate(&args, out),
        Command::Experiment(args) => cmd_experiment(&RunConfig::resolve(&args)?, out),
        Command::Benchmark(args) => cmd_benchmark(&args, out),
    }
}

fn emit(out: &mut dyn std::io::Write, text: &str) -> Result<()> {
    out.write_all(text.as_bytes())
        .map_err(|e| Error::io("<stdout>", e))
}

pub fn cmd_scale(cfg: &RunConfig, out: &mut dyn std::io::Write) -> Result<()> {
    let dataset = cfg.load_data()?;
    cfg.prepare_out_dir()?;
    let scaler = Scaler::fit(&dataset)?;
    scaler.save(cfg.out_dir.join(SCALER_FILE))?;

    let mut csv = String::new();
    for row in dataset.rows() {
        let scaled = scaler.scale(&row.features)?;
        for v in &scaled.values {
            let _ = write!(csv, "{v},");
        }
        let _ = writeln!(csv, "{}", row.label);
    }
    write_file(&cfg.out_dir.join(SCALED_FILE), &csv)?;
    cfg.echo()?;

    let mut msg = format!("scaled {} rows\n", dataset.len());
    for c in scaler.columns() {
        let _ = writeln!(
            msg,
            "  {:<9} min {:>8} max {:>8}{}",
            c.name,
            c.min,
            c.max,
            if c.is_degenerate() {
                "  (degenerate)"
            } else {
                ""
            }
        );
    }
    emit(out, &msg)
}

pub fn cmd_train(cfg: &RunConfig, out: &mut dyn std::io::Write) -> Result<()> {
    let dataset = cfg.load_data()?;
    cfg.prepare_out_dir()?;
    let train_cfg = cfg.train_config();
    let scaler = Scaler::fit(&dataset)?;
    let samples = training_samples(&dataset, &scaler)?;
    let exec = Executor::new(cfg.workers)?;
    let network = Network::with_max_layers(&cfg.layers, cfg.seed, cfg.max_layers)?;
    let outcome = train_with(network, &samples, &train_cfg, &exec)?;

    outcome.network.save(cfg.out_dir.join(MODEL_FILE))?;
    scaler.save(cfg.out_dir.join(SCALER_FILE))?;
    outcome.history.save_csv(cfg.out_dir.join(HISTORY_FILE))?;
    cfg.echo()?;

    emit(
        out,
        &format!(
            "trained {:?} on {} rows\nepochs: {} ({} rolled back)\nfinal SSE: {}\n",
            cfg.layers,
            dataset.len(),
            outcome.history.len(),
            outcome.history.rejected(),
            outcome.history.final_sse().unwrap_or(f64::NAN),
        ),
    )
}

pub fn cmd_evaluate(args: &EvaluateArgs, out: &mut dyn std::io::Write) -> Result<()> {
    let cfg = RunConfig::resolve(&args.common)?;
    let model_path = args
        .model
        .clone()
        .unwrap_or_else(|| cfg.out_dir.join(MODEL_FILE));
    let scaler_path = args
        .scaler
        .clone()
        .unwrap_or_else(|| cfg.out_dir.join(SCALER_FILE));
    let network = Network::load(&model_path)?;
    let scaler = Scaler::load(&scaler_path)?;
    if scaler.columns().len() != N_ATTRIBUTES {
        return Err(Error::Format(format!(
            "{}: expected {N_ATTRIBUTES} columns, found {}",
            scaler_path.display(),
            scaler.columns().len()
        )));
    }
    if network.input_size() != N_ATTRIBUTES || network.output_size() != 2 {
        return Err(Error::Format(format!(
            "{}: model must map {N_ATTRIBUTES} inputs to 2 outputs, has {:?}",
            model_path.display(),
            network.layer_sizes()
        )));
    }
    let dataset = cfg.load_data()?;
    let outside = dataset
        .rows()
        .iter()
        .filter(|r| {
            scaler
                .scale(&r.features)
                .is_ok_and(|s| s.any_out_of_range())
        })
        .count();
    let samples = labeled_samples(&dataset, &scaler)?;
    let exec = Executor::new(cfg.workers)?;
    let metrics = evaluate(&network, &samples, &exec)?;

    let mut msg = format!(
        "samples: {}\nefficiency: {:.2}% ({} / {})\n",
        metrics.n_test, metrics.efficiency, metrics.n_correct, metrics.n_test
    );
    if args.binary {
        let _ = writeln!(
            msg,
            "normal-vs-abnormal efficiency: {:.2}%",
            metrics.binary_efficiency()
        );
    }
    if outside > 0 {
        let _ = writeln!(
            msg,
            "note: {outside} rows fall outside the scaler's fitted range"
        );
    }
    msg.push_str("confusion (rows = true class, columns = predicted):\n");
    msg.push_str("         p0    p1    p2    p3\n");
    for (c, row) in metrics.confusion.iter().enumerate() {
        let _ = writeln!(
            msg,
            "  t{c} {:>5} {:>5} {:>5} {:>5}",
            row[0], row[1], row[2], row[3]
        );
    }

    if args.json {
        cfg.prepare_out_dir()?;
        let value = serde_json::json!({
            "n_test": metrics.n_test,
            "n_correct": metrics.n_correct,
            "efficiency": metrics.efficiency,
            "binary_efficiency": metrics.binary_efficiency(),
            "confusion": metrics.confusion,
        });
        let text = serde_json::to_string_pretty(&value).expect("metrics serialize");
        write_file(&cfg.out_dir.join(METRICS_FILE), &(text + "\n"))?;
    }
    emit(out, &msg)
}

pub fn cmd_experiment(cfg: &RunConfig, out: &mut dyn std::io::Write) -> Result<()> {
    let dataset = cfg.load_data()?;
    cfg.prepare_out_dir()?;
    let exp = ExperimentConfig {
        splits: cfg.splits.clone(),
        architectures: cfg.architectures(),
        train: cfg.train_config(),
        imputation: cfg.impute.to_string(),
    };
    let report = run_experiment(&dataset, &exp)?;
    export_report(&report, cfg.out_dir.join(REPORT_CSV_FILE))?;
    write_file(
        &cfg.out_dir.join(REPORT_JSON_FILE),
        &(report.to_json() + "\n"),
    )?;
    cfg.echo()?;
    emit(out, &report.to_string())
}

/// Wall-clock timings of forward + backward per worker count.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkResult {
    pub workers: usize,
    pub median_seconds: f64,
    pub speedup: f64,
}

pub fn run_benchmark(args: &BenchmarkArgs) -> Result<(Vec<BenchmarkResult>, bool)> {
    if args.width == 0 {
        return Err(Error::Config("--width must be at least 1".into()));
    }
    if args.repetitions == 0 {
        return Err(Error::Config("--repetitions must be at least 1".into()));
    }
    if args.workers_list.is_empty() || args.workers_list.contains(&0) {
        return Err(Error::Config(
            "--workers-list needs positive worker counts".into(),
        ));
    }
    let network = Network::new(&[64, args.width, args.width, 4], args.seed)?;
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed ^ 0x5eed);
    let input: Vec<f64> = (0..64).map(|_| rng.random_range(0.0..1.0)).collect();
    let target: Vec<f64> = (0..4).map(|i| f64::from(i % 2)).collect();

    let mut reference = None;
    let mut identical = true;
    let mut results = Vec::new();
    for &workers in &args.workers_list {
        let exec = Executor::new(workers)?;
        let mut times = Vec::with_capacity(args.repetitions);
        let mut last = None;
        for _ in 0..args.repetitions {
            let start = Instant::now();
            let acts = network.forward(&input, &exec)?;
            let grads = network.backward(&acts, &target, &exec)?;
            times.push(start.elapsed().as_secs_f64());
            last = Some((acts, grads));
        }
        let last = last.expect("at least one repetition");
        match &reference {
            None => reference = Some(last),
            Some(r) => identical &= bits_equal(r, &last),
        }
        times.sort_by(f64::total_cmp);
        results.push(BenchmarkResult {
            workers,
            median_seconds: times[times.len() / 2],
            speedup: 1.0,
        });
    }
    let base = results[0].median_seconds;
    for r in &mut results {
        r.speedup = if r.median_seconds > 0.0 {
            base / r.median_seconds
        } else {
            1.0
        };
    }
    results[0].speedup = 1.0;
    Ok((results, identical))
}

fn bits_equal(
    a: &(crate::network::Activations, crate::network::Gradients),
    b: &(crate::network::Activations, crate::network::Gradients),
) -> bool {
    fn same(x: &[Vec<f64>], y: &[Vec<f64>]) -> bool {
        x.len() == y.len()
            && x.iter().zip(y).all(|(u, v)| {
                u.len() == v.len() && u.iter().zip(v).all(|(p, q)| p.to_bits() == q.to_bits())
            })
    }
    same(a.0.layers(), b.0.layers())
        && same(&a.1.weights, &b.1.weights)
        && same(&a.1.biases, &b.1.biases)
}

pub fn cmd_benchmark(args: &BenchmarkArgs, out: &mut dyn std::io::Write) -> Result<()> {
    let (results, identical) = run_benchmark(args)?;
    let mut msg = format!(
        "network [64, {w}, {w}, 4], {} repetitions, forward + backward\n{:>8} {:>12} {:>8}\n",
        args.repetitions,
        "workers",
        "median_ms",
        "speedup",
        w = args.width
    );
    for r in &results {
        let _ = writeln!(
            msg,
            "{:>8} {:>12.3} {:>8.2}",
            r.workers,
            r.median_seconds * 1e3,
            r.speedup
        );
    }
    let _ = writeln!(
        msg,
        "outputs identical across worker counts: {}",
        if identical { "yes" } else { "no" }
    );
    emit(out, &msg)?;
    if !identical {
        return Err(Error::Validation(
            "outputs differ between worker counts".into(),
        ));
    }
    Ok(())
}

/// Parses `std::env::args`, runs, and returns the process exit code.
pub fn main_with_args() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    match run(cli, &mut lock) {
        Ok(()) => {
            let _ = lock.flush();
            0
        }
        Err(e) => {
            let _ = lock.flush();
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
