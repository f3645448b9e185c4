use std::path::PathBuf;

use chrono::{DateTime, NaiveDate};
use clap::{Args, Parser, Subcommand};
use sanctrace_core::report::Format;
use sanctrace_core::time::midnight;
use sanctrace_core::{Direction, WindowLabel};

#[derive(Debug, Parser)]
#[command(
    name = "sanctrace",
    version,
    about = "Measure how sanctioned entities keep using their Bitcoin addresses"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse every input, print counts and warnings.
    Validate(ValidateArgs),
    /// Pre/post-sanction flow metrics per entity, window and violation.
    Flow(FlowArgs),
    /// Label attribution of addresses reached by n-step expansion.
    Behaviour(BehaviourArgs),
    /// Generate a synthetic input bundle plus expected metrics.
    Synth(SynthArgs),
    /// Dataset statistics, flow and behaviour outputs in one run.
    Report(ReportArgs),
}

#[derive(Debug, Clone, Args)]
pub struct InputArgs {
    /// Transactions, one JSON object per line.
    #[arg(long)]
    pub txs: PathBuf,
    /// SDN list CSV.
    #[arg(long)]
    pub sdn: PathBuf,
    /// Daily BTC/USD prices CSV.
    #[arg(long)]
    pub prices: Option<PathBuf>,
    /// Address tagpack CSV.
    #[arg(long)]
    pub labels: Option<PathBuf>,
    /// Exclusive end of the observation period: unix seconds or YYYY-MM-DD.
    /// Defaults to one second past the last transaction.
    #[arg(long, value_parser = parse_dataset_end)]
    pub dataset_end: Option<i64>,
    /// Treat validation warnings as errors.
    #[arg(long)]
    pub strict: bool,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(long)]
    pub out: PathBuf,
    /// Comma-separated subset of csv,json.
    #[arg(long, value_delimiter = ',', default_value = "csv")]
    pub formats: Vec<Format>,
}

#[derive(Debug, Clone, Copy, Args)]
pub struct ThreadArgs {
    /// Worker threads; results do not depend on it.
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct ExpansionArgs {
    #[arg(long, default_value = "forward")]
    pub direction: Direction,
    /// Comma-separated step counts.
    #[arg(long, value_delimiter = ',', default_value = "1,2")]
    pub steps: Vec<u32>,
    /// Also write one edge list per entity and step count.
    #[arg(long)]
    pub subgraphs: bool,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Where to write the validation table and manifest.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', default_value = "csv")]
    pub formats: Vec<Format>,
    #[command(flatten)]
    pub threads: ThreadArgs,
}

#[derive(Debug, Args)]
pub struct FlowArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    #[command(flatten)]
    pub threads: ThreadArgs,
    /// Restrict per-window outputs; repeat or comma-separate. Defaults to all.
    #[arg(long, value_delimiter = ',')]
    pub window: Vec<WindowLabel>,
    /// Ground-truth sidecar from `synth`; exit 2 on any mismatch.
    #[arg(long)]
    pub expect: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BehaviourArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    #[command(flatten)]
    pub threads: ThreadArgs,
    #[command(flatten)]
    pub expansion: ExpansionArgs,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Scenario JSON.
    #[arg(long)]
    pub config: PathBuf,
    #[command(flatten)]
    pub output: OutputArgs,
    #[command(flatten)]
    pub threads: ThreadArgs,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    #[command(flatten)]
    pub threads: ThreadArgs,
    #[command(flatten)]
    pub expansion: ExpansionArgs,
}

pub fn parse_dataset_end(s: &str) -> Result<i64, String> {
    let s = s.trim();
    if let Ok(ts) = s.parse::<i64>() {
        return Ok(ts);
    }
    if let Ok(date) = NaiveDate::parse_from_str(s, "%Y-%m-%d") {
        return Ok(midnight(date));
    }
    DateTime::parse_from_rfc3339(s)
        .map(|t| t.timestamp())
        .map_err(|_| format!("`{s}` is neither unix seconds, YYYY-MM-DD nor RFC 3339"))
}
