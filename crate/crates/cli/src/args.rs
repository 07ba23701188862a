use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "hexwatt", version, about = "Hexagonal macro-cell RAN energy simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one (scenario, power level, seed) and write its logs.
    Run(RunArgs),
    /// Run a scenario × power-level × seed grid and summarise it.
    Sweep(SweepArgs),
    /// Rebuild summary.json/csv from a sweep's stored run records.
    Aggregate(AggregateArgs),
    /// Draw the four metric panels from a summary.json.
    Plot(PlotArgs),
    /// Recompute metrics from CSV logs and compare with stored results.
    Replay(ReplayArgs),
    /// Dump the site grid, region outline and optionally UE positions.
    Topology(TopologyArgs),
}

#[derive(Debug, Args)]
pub struct ConfigArg {
    /// JSON config with optional `network`, `energy`, `link`, `run` sections.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct PowerArgs {
    /// K^v transmit power in dBm.
    #[arg(long, allow_hyphen_values = true)]
    pub power_dbm: Option<f64>,
    /// K^v transmit power in W.
    #[arg(long)]
    pub power_watts: Option<f64>,
    /// Put K^v to sleep.
    #[arg(long)]
    pub sleep: bool,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub config: ConfigArg,
    /// Built-in scenario name, `baseline`, or comma-separated cell ids.
    #[arg(long)]
    pub scenario: String,
    #[command(flatten)]
    pub power: PowerArgs,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output directory; `run.output_dir` from the config when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub config: ConfigArg,
    /// Repeatable; defaults to the four built-in scenarios.
    #[arg(long = "scenario")]
    pub scenarios: Vec<String>,
    /// Comma-separated dBm levels and/or `sleep`; defaults to 43..1 step 3 plus sleep.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub levels: Vec<String>,
    /// Inclusive seed range `A..B`.
    #[arg(long, default_value = "0..99", conflicts_with = "seed")]
    pub seeds: String,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads; defaults to the number of processors.
    #[arg(long)]
    pub jobs: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Keep per-run ue_log.csv and cell_log.csv under `runs/`.
    #[arg(long)]
    pub keep_logs: bool,
}

#[derive(Debug, Args)]
pub struct AggregateArgs {
    /// Sweep output directory.
    #[arg(long)]
    pub dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    #[arg(long)]
    pub summary: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Scenarios expected in the summary; defaults to the four built-ins.
    #[arg(long = "expect")]
    pub expect: Vec<String>,
}

#[derive(Debug, Args)]
pub struct ReplayArgs {
    /// A `run` output directory or a sweep directory created with `--keep-logs`.
    #[arg(long)]
    pub dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct TopologyArgs {
    #[command(flatten)]
    pub config: ConfigArg,
    #[arg(long)]
    pub out: PathBuf,
    /// Also place and dump UEs for this seed.
    #[arg(long)]
    pub seed: Option<u64>,
}
