//! `gtdist` command-line front end.
//!
//! Exit status: 0 on success, 1 for invalid arguments, configuration or
//! data, 2 for unreadable or malformed files. Results go to stdout (only
//! `eval` prints any); diagnostics go to stderr.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "gtdist", version, about = "Multi-modal ground-truth disparity distributions from stereo ensembles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Model the ground-truth distribution of every pixel from an ensemble and a label map.
    ModelGt(ModelGtArgs),
    /// Split each distribution of a single-member volume into fitted Laplacian modes.
    Separate(SeparateArgs),
    /// Regress a disparity map from a single-member volume.
    Infer(InferArgs),
    /// Compare a predicted disparity map against ground truth.
    Eval(EvalArgs),
    /// Generate a synthetic scene with its truth, labels and perturbed ensemble.
    Synth(SynthArgs),
    /// Build a probability volume from a rectified grayscale pair by block matching.
    Match(MatchArgs),
}

#[derive(Debug, Args)]
struct ModelGtArgs {
    /// Ensemble volumes (MPV); members are concatenated in the order given.
    #[arg(long, required = true, num_args = 1..)]
    ensemble: Vec<PathBuf>,
    /// Disparity labels (PFM); non-finite or negative values are invalid.
    #[arg(long)]
    labels: PathBuf,
    /// Output volume (MPV, one member). The validity mask goes to `<out>.mask.pfm`.
    #[arg(long)]
    out: PathBuf,
    /// Clustering radius on the location axis [default: 3].
    #[arg(long)]
    eps: Option<f32>,
    /// Points (self included) needed for a core point [default: 2].
    #[arg(long)]
    min_pts: Option<usize>,
    /// Peak threshold of the mode separation [default: 1e-3].
    #[arg(long)]
    epsilon: Option<f32>,
    /// Minimum drop for span expansion [default: 1e-3].
    #[arg(long)]
    sigma: Option<f32>,
    /// Weight of the label anchor [default: 1.0].
    #[arg(long)]
    label_w: Option<f32>,
    /// Scale of the label anchor [default: 0.8].
    #[arg(long)]
    label_b: Option<f32>,
    /// Also write the fused modes of every valid pixel as JSON.
    #[arg(long)]
    modes_json: Option<PathBuf>,
    /// Worker threads [default: available cores].
    #[arg(long)]
    workers: Option<usize>,
    /// Keep noise points as singleton modes instead of discarding them.
    #[arg(long)]
    keep_noise: bool,
    /// Model pixels without a valid label from the ensemble alone.
    #[arg(long)]
    ensemble_only: bool,
    /// key=value file with defaults for the options above; flags win.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SeparateArgs {
    #[arg(long)]
    volume: PathBuf,
    /// Output JSON with one entry per pixel.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 1e-3)]
    epsilon: f32,
    #[arg(long, default_value_t = 1e-3)]
    sigma: f32,
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Debug, Args)]
struct InferArgs {
    #[arg(long)]
    volume: PathBuf,
    /// `dme` (dominant mode) or `softargmin`.
    #[arg(long)]
    estimator: String,
    /// Output disparity map (PFM); masked pixels are written as infinity.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 1e-3)]
    epsilon: f32,
    #[arg(long, default_value_t = 1e-3)]
    sigma: f32,
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Debug, Args)]
struct EvalArgs {
    #[arg(long)]
    pred: PathBuf,
    #[arg(long)]
    gt: PathBuf,
    /// Outlier threshold in pixels.
    #[arg(long)]
    threshold: f64,
    /// Also print the end-point error.
    #[arg(long)]
    epe: bool,
}

#[derive(Debug, Args)]
struct SynthArgs {
    /// key=value scene and perturbation settings.
    #[arg(long)]
    spec: PathBuf,
    #[arg(long)]
    out_truth: PathBuf,
    #[arg(long)]
    out_labels: PathBuf,
    #[arg(long)]
    out_ensemble: PathBuf,
}

#[derive(Debug, Args)]
struct MatchArgs {
    #[arg(long)]
    left: PathBuf,
    #[arg(long)]
    right: PathBuf,
    /// Number of disparity candidates.
    #[arg(long)]
    dmax: usize,
    /// Odd window side in pixels.
    #[arg(long)]
    window: usize,
    /// Softmax temperature applied to the matching cost.
    #[arg(long)]
    tau: f32,
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("gtdist: {e}");
            ExitCode::from(if e.is_io_or_format() { 2 } else { 1 })
        }
    }
}
