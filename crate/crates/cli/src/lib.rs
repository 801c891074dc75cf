//! `reidkit` command-line front end.
//!
//! Every subcommand takes an optional `--config <file.json>` holding the
//! same keys as its flags (snake_case); flags given on the command line win
//! over the file. The fully resolved config is echoed under `"config"` in
//! the JSON report, and that object can be fed back through `--config` to
//! repeat the run.
//!
//! Exit codes: 0 success, 1 I/O failure or failed check, 2 invalid config
//! or malformed input, 3 no valid query, 4 extractor failure.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde_json::Value;

pub mod augment;
pub mod bench;
mod config;
pub mod error;
pub mod es;
pub mod eval;
pub mod gradcheck;
pub mod toy;

pub use error::{CliError, CliResult, ExitCode};

#[derive(Debug, Parser)]
#[command(name = "reidkit", version, about = "Person re-identification toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Apply random rectangle or polygon erasing to a directory tree.
    Augment(augment::AugmentArgs),
    /// Score query features against gallery features (CMC / mAP).
    Eval(eval::EvalArgs),
    /// Efficiency score table for a list of model profiles.
    Es(es::EsArgs),
    /// Finite-difference check of the loss gradients.
    Gradcheck(gradcheck::GradcheckArgs),
    /// Retrieval accuracy under synthetic occlusion.
    OcclusionBench(bench::BenchArgs),
    /// Pixel-hash feature extractor speaking the extractor protocol.
    #[command(hide = true)]
    ToyExtract(toy::ToyArgs),
}

#[derive(Debug, Clone, Args)]
pub struct ConfigArg {
    /// JSON file with default values for this subcommand's flags.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

/// Result of a subcommand: a report for stdout plus the exit status.
#[derive(Debug)]
pub struct Outcome {
    pub report: Value,
    pub exit: ExitCode,
    /// Printed to stderr when set.
    pub diagnostic: Option<String>,
}

impl Outcome {
    pub fn ok(report: Value) -> Self {
        Self {
            report,
            exit: ExitCode::Ok,
            diagnostic: None,
        }
    }
}

pub fn run(cli: Cli) -> CliResult<Outcome> {
    match cli.command {
        Command::Augment(a) => augment::command(a),
        Command::Eval(a) => eval::command(a),
        Command::Es(a) => es::command(a),
        Command::Gradcheck(a) => gradcheck::command(a),
        Command::OcclusionBench(a) => bench::command(a),
        Command::ToyExtract(a) => toy::command(a),
    }
}
