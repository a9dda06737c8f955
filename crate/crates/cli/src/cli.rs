use std::path::PathBuf;

use clap::{ArgAction, Args, Parser, Subcommand, ValueEnum};
use wsntrack_core::{RawSettings, Strategy};

/// Multi-target tracking simulator for multi-hop sensor networks.
///
/// Exit status: 0 success, 2 invalid configuration or arguments,
/// 3 unusable topology, 4 internal or I/O failure.
#[derive(Debug, Parser)]
#[command(name = "wsntrack", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one simulation and write its metrics.
    Run(RunArgs),
    /// Run all three strategies on the same network and trajectories.
    Compare(CompareArgs),
    /// Evaluate the closed-form message and energy model.
    Predict(PredictArgs),
    /// Repeat `compare` over a grid of one parameter.
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Args)]
pub struct SimFlags {
    /// TOML file with `SimConfig` keys; flags override it.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Simulated time, seconds.
    #[arg(long, value_name = "SECONDS")]
    pub duration: Option<f64>,
    /// Number of mobile targets.
    #[arg(long)]
    pub targets: Option<usize>,
    /// Number of reference nodes.
    #[arg(long)]
    pub references: Option<usize>,
    /// Reporting period, seconds.
    #[arg(long, value_name = "SECONDS")]
    pub frequency: Option<f64>,
    /// Per-hop packet loss probability.
    #[arg(long)]
    pub loss_rate: Option<f64>,
    /// Shadowing standard deviation, dB.
    #[arg(long)]
    pub noise_sigma: Option<f64>,
    /// Parent of the per-run output directory.
    #[arg(long, default_value = "runs", value_name = "DIR")]
    pub out_dir: PathBuf,
}

impl SimFlags {
    pub fn overrides(&self) -> RawSettings {
        RawSettings {
            seed: self.seed,
            duration_s: self.duration,
            num_targets: self.targets,
            num_references: self.references,
            reporting_period_s: self.frequency,
            loss_rate: self.loss_rate,
            noise_sigma_db: self.noise_sigma,
            ..RawSettings::default()
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub sim: SimFlags,
    #[arg(long, default_value = "improved")]
    pub strategy: Strategy,
    /// Also write the per-round leader groups to groups.csv.
    #[arg(long)]
    pub dump_groups: bool,
}

#[derive(Debug, Clone, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub sim: SimFlags,
    /// Seeds to replicate over; defaults to the configured seed.
    #[arg(long, value_delimiter = ',')]
    pub seeds: Vec<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelParam {
    R,
    M,
    L,
    F,
    H,
    Lf,
    Capacity,
}

impl ModelParam {
    pub fn as_str(self) -> &'static str {
        match self {
            ModelParam::R => "r",
            ModelParam::M => "m",
            ModelParam::L => "l",
            ModelParam::F => "f",
            ModelParam::H => "h",
            ModelParam::Lf => "lf",
            ModelParam::Capacity => "capacity",
        }
    }
}

#[derive(Debug, Clone, Args)]
#[command(disable_help_flag = true)]
pub struct PredictArgs {
    /// Covering references per target.
    #[arg(short = 'r', default_value_t = 3.0)]
    pub r: f64,
    /// Number of targets.
    #[arg(short = 'm', default_value_t = 10.0)]
    pub m: f64,
    /// Run length, seconds.
    #[arg(short = 'l', default_value_t = 360.0)]
    pub l: f64,
    /// Reporting period, seconds.
    #[arg(short = 'f', default_value_t = 2.0)]
    pub f: f64,
    /// Average hops to the sink.
    #[arg(short = 'h', long = "hops", default_value_t = 5.0)]
    pub h: f64,
    /// Number of rounds; sets l = lf * f.
    #[arg(long)]
    pub lf: Option<f64>,
    /// Locations per aggregate packet.
    #[arg(long, default_value_t = 5)]
    pub capacity: u32,
    #[arg(long, default_value_t = 44.0)]
    pub tx_cost: f64,
    #[arg(long, default_value_t = 49.0)]
    pub rx_cost: f64,
    /// Parameter to sweep.
    #[arg(long, requires = "range")]
    pub sweep: Option<ModelParam>,
    /// Sweep grid as START:END[:STEP], inclusive.
    #[arg(long, value_name = "START:END[:STEP]")]
    pub range: Option<String>,
    /// Also write the table as CSV.
    #[arg(long, value_name = "PATH")]
    pub csv: Option<PathBuf>,
    #[arg(long, action = ArgAction::Help)]
    pub help: Option<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepVariable {
    Targets,
    References,
    Frequency,
}

impl SweepVariable {
    pub fn as_str(self) -> &'static str {
        match self {
            SweepVariable::Targets => "targets",
            SweepVariable::References => "references",
            SweepVariable::Frequency => "frequency",
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub sim: SimFlags,
    #[arg(long)]
    pub variable: SweepVariable,
    /// Explicit grid points.
    #[arg(long, value_delimiter = ',', conflicts_with = "range")]
    pub values: Vec<f64>,
    /// Grid as START:END[:STEP], inclusive.
    #[arg(long, value_name = "START:END[:STEP]")]
    pub range: Option<String>,
    #[arg(long, value_delimiter = ',')]
    pub seeds: Vec<u64>,
}
