//! `prefault`: command-line frontend for the fault-prediction pipeline.
//!
//! Every subcommand writes its outputs plus a `<command>.manifest.json`
//! recording the run configuration and the SHA-256 of each input and
//! output file, so any artifact can be traced back to what produced it.
//!
//! Exit codes: 0 success, 2 usage error, 3 data error, 4 internal error.

mod commands;
mod config;
mod failure;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{correlate, evaluate, extract, registry, report, select, synth, train, windows};
use failure::{Failure, Result};

#[derive(Parser)]
#[command(name = "prefault", version, about = "Pre-fault feature pipeline for substation waveforms")]
struct Cli {
    /// Run configuration JSON; defaults are used where keys are absent.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Size of the worker pool; does not affect results.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Describe the feature registry, or dump one family as a selection.
    Registry(registry::RegistryArgs),
    /// Generate synthetic waveforms.
    #[command(subcommand)]
    Synth(synth::SynthWhat),
    /// Pick the representative windows out of minute recordings.
    Windows(windows::WindowsArgs),
    /// Compute feature vectors from waveform windows.
    Extract(extract::ExtractArgs),
    /// Run cross-validated recursive elimination over a feature table.
    Select(select::SelectArgs),
    /// Relate surrogate-task accuracy to fault-prediction skill.
    Correlate(correlate::CorrelateArgs),
    /// Fit the fault-prediction model on hourly features.
    Train(train::TrainArgs),
    /// Score hourly features with a trained model.
    Predict(train::PredictArgs),
    /// Match predictions against a fault log.
    Eval(evaluate::EvalArgs),
    /// Re-train and evaluate across a set of horizons.
    Sweep(evaluate::SweepArgs),
    /// Flatten an evaluation report into plot-ready tables.
    Report(report::ReportArgs),
}

fn run(cli: Cli) -> Result<()> {
    if let Some(threads) = cli.threads {
        if threads == 0 {
            return Err(Failure::Usage("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| Failure::Internal(format!("thread pool: {e}")))?;
    }
    let config = config::load(cli.config.as_deref())?;
    match cli.command {
        Command::Registry(args) => registry::run(args, config),
        Command::Synth(what) => synth::run(what, config),
        Command::Windows(args) => windows::run(args, config),
        Command::Extract(args) => extract::run(args, config),
        Command::Select(args) => select::run(args, config),
        Command::Correlate(args) => correlate::run(args, config),
        Command::Train(args) => train::train(args, config),
        Command::Predict(args) => train::predict(args, config),
        Command::Eval(args) => evaluate::eval(args, config),
        Command::Sweep(args) => evaluate::sweep(args, config),
        Command::Report(args) => report::run(args, config),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.code())
        }
    }
}
