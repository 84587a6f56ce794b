use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use simulmob_core::ZoneRange;

#[derive(Debug, Parser)]
#[command(
    name = "simulmob",
    version,
    about = "Simultaneous mobility simulator for two nodes in adjacent zones"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a preset or a config file and print per-sample tallies.
    Simulate(SimulateArgs),
    /// Classify an embedded dataset or a CSV of moves and diff against published counts.
    Replay(ReplayArgs),
    /// Average-step crossing estimator next to the exact enumeration and observed counts.
    Estimate(EstimateArgs),
    /// Plot node positions against run or step index.
    Plot(PlotArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Table,
    Csv,
    Json,
}

#[derive(Debug, Clone, Default, Args)]
pub struct LayoutArgs {
    /// Zone 0 as LO:HI (inclusive).
    #[arg(long, value_name = "LO:HI", value_parser = parse_zone)]
    pub zone0: Option<ZoneRange>,
    /// Zone 1 as LO:HI (inclusive).
    #[arg(long, value_name = "LO:HI", value_parser = parse_zone)]
    pub zone1: Option<ZoneRange>,
    /// Brink plane position.
    #[arg(long, value_name = "N", allow_negative_numbers = true)]
    pub brink: Option<i64>,
}

impl LayoutArgs {
    pub fn is_empty(&self) -> bool {
        self.zone0.is_none() && self.zone1.is_none() && self.brink.is_none()
    }
}

fn parse_zone(s: &str) -> Result<ZoneRange, String> {
    s.parse()
}

#[derive(Debug, Clone, Default, Args)]
pub struct ScenarioArgs {
    /// Preset experiment: 1, 2 or 3.
    #[arg(long, value_name = "N")]
    pub scenario: Option<u32>,
    /// JSON scenario config file.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Base seed; every sample or run uses its own substream of it.
    #[arg(long, value_name = "N", env = "SIMULMOB_SEED")]
    pub seed: Option<u64>,
    /// Runs per sample (independent shape) or number of runs (sequential shape).
    #[arg(long, value_name = "N")]
    pub runs: Option<u32>,
    /// Number of samples (independent shape only).
    #[arg(long, value_name = "N")]
    pub samples: Option<u32>,
    /// Largest step length; steps are drawn uniformly from 0..=N.
    #[arg(long, value_name = "N")]
    pub max_step: Option<u32>,
    #[command(flatten)]
    pub layout: LayoutArgs,
}

impl ScenarioArgs {
    pub fn is_set(&self) -> bool {
        self.scenario.is_some() || self.config.is_some()
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct SourceArgs {
    /// Embedded dataset: table-1, table-3, table-5 or table-6.
    #[arg(long, value_name = "ID")]
    pub dataset: Option<String>,
    /// CSV of moves (step,mn0_init,mn0_new,mn1_init,mn1_new[,outcome]).
    #[arg(long, value_name = "PATH")]
    pub input: Option<PathBuf>,
    /// Treat CSV input as one chained walk rather than independent moves.
    #[arg(long)]
    pub sequential: bool,
}

impl SourceArgs {
    pub fn is_set(&self) -> bool {
        self.dataset.is_some() || self.input.is_some()
    }
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    #[arg(long, value_enum, default_value = "table")]
    pub format: OutputFormat,
    /// Write a movement trace here.
    #[arg(long, value_name = "PATH")]
    pub trace: Option<PathBuf>,
    /// Put STEP-k headers in the trace.
    #[arg(long)]
    pub step_headers: bool,
    /// Write a plot of the first sample or run here.
    #[arg(long, value_name = "PATH")]
    pub plot: Option<PathBuf>,
    /// Plot as ASCII text instead of SVG.
    #[arg(long)]
    pub ascii: bool,
}

#[derive(Debug, Args)]
pub struct ReplayArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[command(flatten)]
    pub layout: LayoutArgs,
    #[arg(long, value_enum, default_value = "table")]
    pub format: OutputFormat,
    #[arg(long, value_name = "PATH")]
    pub trace: Option<PathBuf>,
    #[arg(long)]
    pub step_headers: bool,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    #[arg(long, value_enum, default_value = "table")]
    pub format: OutputFormat,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    /// Output file; stdout when omitted.
    #[arg(
        short = 'o',
        long = "plot",
        visible_alias = "output",
        value_name = "PATH"
    )]
    pub output: Option<PathBuf>,
    #[arg(long)]
    pub ascii: bool,
}
