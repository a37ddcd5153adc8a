//! Command-line surface: each subcommand builds a construction, runs the
//! verifications and returns a replayable [`Report`].

pub mod commands;
pub mod config;
pub mod report;

use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

pub use commands::execute;
pub use report::{render, stable_json, Format, Report};

#[derive(Debug, Parser)]
#[command(name = "sprox", version, about = "Witness constructions and finite-horizon verification of proximal pairs")]
pub struct Cli {
    /// Output format: json, text or csv.
    #[arg(long, global = true)]
    pub output: Option<Format>,
    /// Seed for randomized parameters.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// key=value file supplying option defaults.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Cmd,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Cmd {
    /// Primitivity, coincidences, column number and pair classes of a substitution.
    AnalyzeSubstitution(AnalyzeSubstitution),
    /// Closeness profile of a constructed pair.
    VerifyPair(VerifyPair),
    /// Prefix of a witness stream.
    ConstructWitness(ConstructWitness),
    /// Circular-code test for a coded family or word list.
    CheckCircular(CheckCircular),
    /// Syndetic / thick / piecewise classification of a subset of ℕ.
    ClassifySet(ClassifySet),
    /// Transitivity, period and synchronizing words of a vertex shift or SFT.
    SftInfo(SftInfo),
    /// Covering ladder, coding schedule and exact orbit trace for an interval map.
    IntervalTrace(IntervalTrace),
    /// Milestones and distance series of the circle-times-heights example.
    RotationExample(RotationExample),
}

#[derive(Debug, Clone, Args)]
pub struct AnalyzeSubstitution {
    /// e.g. "a->aab; b->bad".
    #[arg(long)]
    pub rules: String,
    #[arg(long, default_value_t = 5)]
    pub depth: u32,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyPair {
    /// substitution-fixed-points (alias ex55-fixed-points) | base-scrambled | spread | quartic | golden-blocks
    #[arg(long, default_value = "substitution-fixed-points")]
    pub construction: String,
    #[arg(long)]
    pub horizon: Option<u64>,
    /// Agreement lengths m, one per level 2^-m, e.g. "1,2,4,8".
    #[arg(long)]
    pub epsilon_levels: Option<String>,
    /// Substitution for the fixed-point construction.
    #[arg(long)]
    pub rules: Option<String>,
    /// Two letters whose fixed points form the pair, e.g. "a,b".
    #[arg(long)]
    pub letters: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct ConstructWitness {
    /// base-scrambled | spread | geometric | quartic | sft-blocks | sync-blocks | fixed-point
    #[arg(long)]
    pub construction: String,
    #[arg(long, default_value_t = 4096)]
    pub length: usize,
    /// Vertex-shift adjacency file or SFT spec file (default: golden mean).
    #[arg(long)]
    pub graph: Option<PathBuf>,
    /// Cycle word for sft-blocks, synchronizing word for sync-blocks.
    #[arg(long)]
    pub word: Option<String>,
    #[arg(long)]
    pub rules: Option<String>,
    #[arg(long)]
    pub letter: Option<char>,
    #[arg(long, default_value_t = 8)]
    pub depth: usize,
}

#[derive(Debug, Clone, Args)]
pub struct CheckCircular {
    /// Named family: padded-even (alias ex49), words 1 u(k) 1 0^{4k}.
    #[arg(long)]
    pub family: Option<String>,
    #[arg(long, default_value_t = 4)]
    pub n: u64,
    /// Comma-separated generator words over {0,1}.
    #[arg(long)]
    pub words: Option<String>,
    #[arg(long, default_value_t = 60)]
    pub test_length: usize,
}

#[derive(Debug, Clone, Args)]
pub struct ClassifySet {
    /// all | evens | multiples:K | square-blocks | triadic-blocks | powers-of-two | avoid-powers:M | explicit:1,2
    #[arg(long)]
    pub rule: String,
    #[arg(long, default_value_t = 4096)]
    pub horizon: u64,
    #[arg(long, default_value_t = 8)]
    pub max_depth: u64,
    #[arg(long, default_value_t = 64)]
    pub max_piecewise_gap: u64,
}

#[derive(Debug, Clone, Args)]
pub struct SftInfo {
    #[arg(long)]
    pub graph: Option<PathBuf>,
    /// Forbidden words, comma-separated.
    #[arg(long)]
    pub forbidden: Option<String>,
    #[arg(long, default_value = "01")]
    pub alphabet: String,
    #[arg(long)]
    pub sync_word: Option<String>,
    #[arg(long)]
    pub cycle_word: Option<String>,
    #[arg(long, default_value_t = 6)]
    pub depth: usize,
}

#[derive(Debug, Clone, Args)]
pub struct IntervalTrace {
    /// Breakpoint:value pairs, e.g. "0:0, 1/2:1, 1:0" (default tent).
    #[arg(long)]
    pub map: Option<String>,
    #[arg(long, default_value = "0110")]
    pub coding: String,
    /// positive-zero | fixed-points
    #[arg(long, default_value = "positive-zero")]
    pub variant: String,
    /// Decreasing fixed points p_2, p_3, … for the fixed-points variant.
    #[arg(long)]
    pub fixed_points: Option<String>,
    /// Ladder depth (default |coding| + 1).
    #[arg(long)]
    pub depth: Option<usize>,
    #[arg(long, default_value_t = 16)]
    pub extra_horizon: usize,
}

#[derive(Debug, Clone, Args)]
pub struct RotationExample {
    #[arg(long, default_value_t = 50)]
    pub n_max: u64,
    /// Series length (default m(40) = 820).
    #[arg(long)]
    pub horizon: Option<u64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long, default_value_t = 0.1)]
    pub epsilon: f64,
    /// origin | rotated
    #[arg(long, default_value = "origin")]
    pub start: String,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Input(sprox_core::Error),
    #[error("{0}")]
    Invariant(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Input(_) => 2,
            CliError::Invariant(_) => 1,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Input(_) => "invalid-input",
            CliError::Invariant(_) => "invariant-violation",
        }
    }
}

impl From<sprox_core::Error> for CliError {
    fn from(e: sprox_core::Error) -> Self {
        use sprox_core::Error::*;
        match e {
            ConstructionInvariant(_) | InternalInvariant(_) | TraceInvalid { .. } | LadderFailure(_) | SearchExhausted(_) => {
                CliError::Invariant(e.to_string())
            }
            other => CliError::Input(other),
        }
    }
}

/// Result of one invocation.
#[derive(Debug)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
    pub report: Option<Report>,
}

fn diagnostic(kind: &str, message: &str, failed: &[String]) -> String {
    let mut v = json!({ "error": kind, "message": message });
    if !failed.is_empty() {
        v["failed"] = json!(failed);
    }
    format!("{v}\n")
}

pub fn run<I: IntoIterator<Item = String>>(args: I) -> Outcome {
    let args: Vec<String> = args.into_iter().collect();
    let fail = |e: CliError| Outcome {
        code: e.exit_code(),
        stdout: String::new(),
        stderr: diagnostic(e.kind(), &e.to_string(), &[]),
        report: None,
    };
    let args = match config::inject_config(args) {
        Ok(a) => a,
        Err(e) => return fail(CliError::Usage(e)),
    };
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind::*;
            return match e.kind() {
                DisplayHelp | DisplayVersion | DisplayHelpOnMissingArgumentOrSubcommand if e.exit_code() == 0 => {
                    Outcome { code: 0, stdout: e.to_string(), stderr: String::new(), report: None }
                }
                _ => Outcome { code: 2, stdout: String::new(), stderr: e.to_string(), report: None },
            };
        }
    };
    let format = cli.output.unwrap_or_default();
    let start = Instant::now();
    let mut report = match execute(&cli.command, cli.seed.unwrap_or(1)) {
        Ok(r) => r,
        Err(e) => return fail(e),
    };
    report.wall_time_ms = start.elapsed().as_secs_f64() * 1e3;
    let Some(stdout) = render(&report, format) else {
        return fail(CliError::Usage(format!("{} has no CSV series", report.command)));
    };
    let failed: Vec<String> = report.failed_checks().iter().map(|c| c.name.clone()).collect();
    let (code, stderr) = if failed.is_empty() {
        (0, String::new())
    } else {
        (1, diagnostic("invariant-violation", "claimed invariants failed", &failed))
    };
    Outcome { code, stdout, stderr, report: Some(report) }
}
