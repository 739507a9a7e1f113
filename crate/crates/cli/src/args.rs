//! Command-line surface. Scenario flags are shared by every
//! subcommand; simulation flags only by the ones that run the Monte
//! Carlo. All scenario and simulation flags are optional so the layer
//! merge in `config` can tell "explicitly passed" from "defaulted".

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;

#[derive(Parser, Debug)]
#[command(
    name = "aoi",
    version,
    about = "Average age-of-information analysis for short-packet multi-sensor links"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Closed-form averages, the break-even redundancy, and the better scheme
    Analyze(AnalyzeArgs),
    /// Monte Carlo the slot process and compare against the closed form
    Simulate(SimulateArgs),
    /// Evaluate a grid of scenarios and emit CSV
    Sweep(SweepArgs),
    /// Search integer blocklengths for the minimum average age
    Optimize(OptimizeArgs),
    /// Locate the redundancy where the two schemes trade places
    Compare(CompareArgs),
}

#[derive(Args, Debug, Default)]
pub struct ScenarioFlags {
    /// Number of sensors N
    #[arg(long)]
    pub sensors: Option<u32>,
    /// Information bits per sensor update L_h
    #[arg(long)]
    pub bits_per_sensor: Option<u32>,
    /// Redundancy (bits) the joint encoder removes from the pooled update
    #[arg(long)]
    pub alpha: Option<u32>,
    /// Coding rate R in information bits per channel use
    #[arg(long)]
    pub rate: Option<f64>,
    /// Channel SNR, linear
    #[arg(long, conflicts_with = "snr_db")]
    pub snr: Option<f64>,
    /// Channel SNR in dB
    #[arg(long)]
    pub snr_db: Option<f64>,
    /// Seconds per channel use; only affects --seconds output
    #[arg(long)]
    pub slot_duration: Option<f64>,
    /// Flat key=value settings file, weaker than flags
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Replay a recorded run; flags still override recorded values
    #[arg(long, value_name = "PATH")]
    pub from_manifest: Option<PathBuf>,
    /// Record this run's resolved inputs as JSON
    #[arg(long, value_name = "PATH")]
    pub manifest_out: Option<PathBuf>,
}

#[derive(Args, Debug, Default)]
pub struct SimFlags {
    /// Frames (joint) or superframes (distributed) per replication,
    /// warm-up included
    #[arg(long)]
    pub frames: Option<u64>,
    /// Warm-up frames dropped from the front; default min(1000, frames/10)
    #[arg(long)]
    pub warmup: Option<u64>,
    /// Independent replications behind the confidence interval
    #[arg(long)]
    pub replications: Option<u32>,
    /// Base RNG seed
    #[arg(long)]
    pub seed: Option<u64>,
    /// Pin the block error rate instead of deriving it from the channel
    #[arg(long, value_name = "EPS")]
    pub forced_error: Option<f64>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemeArg {
    Joint,
    Distributed,
    Both,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemeOnlyArg {
    Joint,
    Distributed,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum VariableArg {
    /// Coding rate R
    Rate,
    /// Sensor count N
    Sensors,
    /// Removed redundancy alpha
    Alpha,
    /// Packet blocklength (rate re-derived per scheme)
    Blocklength,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum PresetArg {
    /// Coding rate 0.3..1.4 step 0.05; runs both default payload sizes
    /// (60 and 120 bits) unless --bits-per-sensor is given
    Fig3,
    /// Sensor count 1..10
    Fig4,
    /// Redundancy 0..(N-1)*L_h step 40
    Fig5,
}

#[derive(Args, Debug)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub scenario: ScenarioFlags,
    /// Pin the block error rate for both schemes
    #[arg(long, value_name = "EPS")]
    pub forced_error: Option<f64>,
    /// Report ages in seconds instead of slots
    #[arg(long)]
    pub seconds: bool,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub scenario: ScenarioFlags,
    #[command(flatten)]
    pub sim: SimFlags,
    /// Which scheme to simulate [default: both]
    #[arg(long, value_enum)]
    pub scheme: Option<SchemeArg>,
    /// Report ages in seconds instead of slots
    #[arg(long)]
    pub seconds: bool,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[command(flatten)]
    pub scenario: ScenarioFlags,
    #[command(flatten)]
    pub sim: SimFlags,
    /// Canned sweep instead of --var/--grid
    #[arg(
        long,
        value_enum,
        conflicts_with_all = ["var", "grid", "grid_from", "grid_to", "grid_step", "from_manifest"]
    )]
    pub preset: Option<PresetArg>,
    /// Scenario knob to vary
    #[arg(long, value_enum, conflicts_with = "from_manifest")]
    pub var: Option<VariableArg>,
    /// Explicit comma-separated grid values
    #[arg(
        long,
        value_delimiter = ',',
        value_name = "V1,V2,...",
        conflicts_with_all = ["grid_from", "grid_to", "grid_step"],
        requires = "var"
    )]
    pub grid: Option<Vec<f64>>,
    /// Grid start (with --grid-to and --grid-step)
    #[arg(long, requires = "var")]
    pub grid_from: Option<f64>,
    /// Grid end, inclusive when hit exactly
    #[arg(long, requires = "var")]
    pub grid_to: Option<f64>,
    /// Grid spacing, > 0
    #[arg(long, requires = "var")]
    pub grid_step: Option<f64>,
    /// Which scheme(s) to tabulate [default: both]
    #[arg(long, value_enum)]
    pub scheme: Option<SchemeArg>,
    /// Also Monte Carlo every bounded point
    #[arg(long = "sim")]
    pub with_sim: bool,
    /// Write CSV here instead of stdout
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct OptimizeArgs {
    #[command(flatten)]
    pub scenario: ScenarioFlags,
    /// Whose packet to size [default: joint]
    #[arg(long, value_enum)]
    pub scheme: Option<SchemeOnlyArg>,
    /// Smallest blocklength to try [default: the packet's information bits]
    #[arg(long)]
    pub m_from: Option<u32>,
    /// Largest blocklength to try [default: 5x the information bits]
    #[arg(long)]
    pub m_to: Option<u32>,
    /// Pin the block error rate
    #[arg(long, value_name = "EPS")]
    pub forced_error: Option<f64>,
    /// Report ages in seconds instead of slots
    #[arg(long)]
    pub seconds: bool,
    /// Write the full blocklength profile as CSV
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct CompareArgs {
    #[command(flatten)]
    pub scenario: ScenarioFlags,
    /// Redundancy search range start [default: 0]
    #[arg(long)]
    pub alpha_from: Option<u32>,
    /// Redundancy search range end [default: N*L_h - 1]
    #[arg(long)]
    pub alpha_to: Option<u32>,
    /// Pin the block error rate
    #[arg(long, value_name = "EPS")]
    pub forced_error: Option<f64>,
}
