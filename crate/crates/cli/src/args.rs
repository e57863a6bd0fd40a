use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "nesy-verify", version, about = "Bound neural-symbolic systems over input perturbations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compile a propositional formula (or DIMACS CNF) into an arithmetic circuit.
    Compile(CompileArgs),
    /// Verify a dataset against a system manifest at one or more radii.
    Verify(VerifyArgs),
    /// Time relaxed against exact-symbolic bounds on digit addition.
    BenchAddition(BenchArgs),
    /// Cross-check E-MAJSAT against its E-WMC encoding on random formulas.
    EmajsatCheck(EmajsatArgs),
    /// Train a dense digit classifier.
    Train(TrainArgs),
    /// Write a complete digit-addition system: weights, circuit, manifest, dataset.
    SetupAddition(SetupArgs),
}

#[derive(Debug, Args)]
pub struct CompileArgs {
    /// Formula text, or DIMACS when the file ends in `.cnf`.
    pub formula: PathBuf,
    /// Branching order as comma-separated variable names.
    #[arg(long, value_delimiter = ',')]
    pub order: Option<Vec<String>>,
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub manifest: PathBuf,
    #[arg(long)]
    pub dataset: PathBuf,
    #[arg(long, value_delimiter = ',', required = true)]
    pub eps: Vec<f64>,
    /// Also compute exact circuit bounds over the network-output box.
    #[arg(long)]
    pub exact_symbolic: bool,
    #[arg(long)]
    pub threads: Option<usize>,
    /// Per-sample limit in seconds.
    #[arg(long)]
    pub timeout_s: Option<f64>,
    /// Directory for the JSON and CSV reports.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DigitSource {
    /// Trained digit classifier; trained on synthetic fixtures when absent.
    #[arg(long)]
    pub weights: Option<PathBuf>,
    /// IDX images to draw digits from; synthetic fixtures when absent.
    #[arg(long, requires = "labels")]
    pub images: Option<PathBuf>,
    #[arg(long, requires = "images")]
    pub labels: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, value_delimiter = ',', default_value = "2,3,4")]
    pub digits: Vec<usize>,
    /// Defaults to five radii log-spaced from 1e-5 to 1e-3.
    #[arg(long, value_delimiter = ',')]
    pub eps: Option<Vec<f64>>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 50)]
    pub samples: usize,
    /// Per-sample limit for the exact method.
    #[arg(long, default_value_t = 60.0)]
    pub timeout_s: f64,
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
    #[arg(long, default_value_t = 3)]
    pub repeats: usize,
    #[command(flatten)]
    pub source: DigitSource,
    /// CSV output path; printed to stdout as well.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EmajsatArgs {
    #[arg(long, default_value_t = 200)]
    pub count: usize,
    #[arg(long, default_value_t = 4)]
    pub max_n: usize,
    #[arg(long, default_value_t = 6)]
    pub max_m: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// IDX training images; synthetic fixtures when absent.
    #[arg(long, requires = "labels")]
    pub images: Option<PathBuf>,
    #[arg(long, requires = "images")]
    pub labels: Option<PathBuf>,
    /// Held-out IDX images for the reported accuracy.
    #[arg(long, requires = "test_labels")]
    pub test_images: Option<PathBuf>,
    #[arg(long, requires = "test_images")]
    pub test_labels: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', default_value = "32")]
    pub hidden: Vec<usize>,
    #[arg(long, default_value_t = 8)]
    pub epochs: usize,
    #[arg(long, default_value_t = 0.05)]
    pub learning_rate: f64,
    #[arg(long, default_value_t = 32)]
    pub batch_size: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, short)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SetupArgs {
    #[arg(long, default_value_t = 2)]
    pub digits: usize,
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub source: DigitSource,
    /// Output directory.
    #[arg(long, short)]
    pub out: PathBuf,
}
