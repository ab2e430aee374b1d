use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use speckle_core::activity::HistScope;
use speckle_core::wavelet::Shrink;

#[derive(Debug, Parser)]
#[command(
    name = "speckle",
    version,
    about = "Speckle activity detection and Haar wavelet de-noising for frame sequences"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum RuleArg {
    Universal,
    Manual,
}

/// Flags shared by every subcommand. Unset flags fall back to the config file,
/// then to built-in defaults.
#[derive(Debug, Clone, Default, Args)]
pub struct GlobalArgs {
    /// Region parameter Z (2Z-1 intensity regions), 1..=8
    #[arg(long, global = true)]
    pub z: Option<u32>,
    /// Absolute activity-index threshold
    #[arg(long, global = true, conflicts_with = "threshold_per_pixel")]
    pub threshold: Option<f64>,
    /// Threshold as a fraction of N_p/N_F (default 0.05)
    #[arg(long, global = true)]
    pub threshold_per_pixel: Option<f64>,
    /// Wavelet decomposition depth
    #[arg(long, global = true)]
    pub levels: Option<usize>,
    #[arg(long, global = true, value_parser = parse_shrink)]
    pub shrink: Option<Shrink>,
    #[arg(long, global = true, value_enum)]
    pub rule: Option<RuleArg>,
    /// Manual wavelet threshold (implies --rule manual)
    #[arg(long = "manual-t", global = true)]
    pub manual_t: Option<f64>,
    /// Frames feeding the region histogram: sequence or first-frame
    #[arg(long, global = true, value_parser = parse_scope)]
    pub hist_scope: Option<HistScope>,
    /// Threshold in the log domain
    #[arg(long, global = true)]
    pub homomorphic: bool,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Run detection on the streaming hardware model and check it against the batch path
    #[arg(long, global = true)]
    pub hw: bool,
    /// Write a per-cycle TSV trace of the hardware model (implies --hw)
    #[arg(long, global = true)]
    pub trace: Option<PathBuf>,
    /// MEM_FLAGS counter width for --hw (default ceil(log2 N_F))
    #[arg(long, global = true)]
    pub counter_width: Option<u32>,
    /// key=value configuration file
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub out_dir: Option<PathBuf>,
    /// Print the JSON report on stdout
    #[arg(long, global = true)]
    pub json: bool,
}

fn parse_shrink(s: &str) -> Result<Shrink, String> {
    s.parse()
}

fn parse_scope(s: &str) -> Result<HistScope, String> {
    s.parse()
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute the activity index and report whether the sequence is speckled.
    /// Exit status 0 means speckle free, 1 means speckle detected.
    Detect(DetectArgs),
    /// Run the full pipeline and write de-noised frames when activity exceeds the threshold
    Denoise(DenoiseArgs),
    /// Write a sequence of speckled copies of a clean frame
    Synth(SynthArgs),
    /// Sweep noise variance and seeds, printing per-run metrics as CSV
    Bench(BenchArgs),
    /// Compare clean, noisy and de-noised frames
    Metrics(MetricsArgs),
}

#[derive(Debug, Args)]
pub struct DetectArgs {
    /// Frame paths or glob patterns; globs expand in lexicographic order
    pub inputs: Vec<String>,
    /// Print the verdict for a grid of candidate thresholds
    #[arg(long)]
    pub sweep_threshold: bool,
    /// Grid points for --sweep-threshold
    #[arg(long, default_value_t = 20)]
    pub sweep_steps: usize,
}

#[derive(Debug, Args)]
pub struct DenoiseArgs {
    pub inputs: Vec<String>,
    /// De-noise regardless of the activity verdict
    #[arg(long)]
    pub force: bool,
    /// Clean reference frame for metrics
    #[arg(long)]
    pub clean: Option<PathBuf>,
    /// Frame used as the noisy image in metrics
    #[arg(long)]
    pub metrics_frame: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    pub clean: PathBuf,
    #[arg(long, allow_negative_numbers = true)]
    pub variance: f64,
    #[arg(long, default_value_t = 4)]
    pub frames: usize,
    /// Gaussian instead of uniform multiplicative noise
    #[arg(long)]
    pub gaussian_speckle: bool,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    pub clean: PathBuf,
    /// Explicit comma-separated variance grid
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub variances: Option<Vec<f64>>,
    #[arg(long, default_value_t = 0.001)]
    pub var_min: f64,
    #[arg(long, default_value_t = 0.08)]
    pub var_max: f64,
    /// Log-spaced grid points between --var-min and --var-max
    #[arg(long, default_value_t = 10)]
    pub points: usize,
    #[arg(long, default_value_t = 10)]
    pub seeds: usize,
    /// Frames synthesized per run
    #[arg(long, default_value_t = 4)]
    pub frames: usize,
    #[arg(long)]
    pub gaussian_speckle: bool,
    /// CSV destination (stdout when absent)
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MetricsArgs {
    pub clean: PathBuf,
    pub noisy: PathBuf,
    pub denoised: PathBuf,
}
