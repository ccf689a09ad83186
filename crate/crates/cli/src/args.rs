use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "espm", version, about = "Single particle battery model: simulate, identify, sweep")]
pub struct Cli {
    /// Worker threads for parallel evaluations (default: all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Constant-current discharge; writes trace.csv and summary.json.
    Simulate(SimulateArgs),
    /// Fit a phase's parameter vector to a voltage record; writes a JSON report.
    Identify(IdentifyArgs),
    /// Vary the anode LAM coefficients over an aged horizon; writes per-point
    /// traces, envelope.csv and summary.json.
    Sweep(SweepArgs),
    /// Generate a noisy synthetic discharge dataset from the built-in truth
    /// vector of a phase.
    Synth(SynthArgs),
}

#[derive(Debug, Clone, Args)]
pub struct CurrentArgs {
    /// Current as a multiple of the config's nominal capacity (default 1/3).
    #[arg(long, conflicts_with = "current")]
    pub c_rate: Option<f64>,
    /// Current in amperes; positive discharges.
    #[arg(long)]
    pub current: Option<f64>,
}

impl CurrentArgs {
    pub fn resolve(&self, nominal_capacity_ah: f64) -> f64 {
        match (self.current, self.c_rate) {
            (Some(i), _) => i,
            (None, Some(rate)) => rate * nominal_capacity_ah,
            (None, None) => nominal_capacity_ah / 3.0,
        }
    }
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[command(flatten)]
    pub current: CurrentArgs,
    /// Voltage cutoff (default: the config's).
    #[arg(long)]
    pub cutoff: Option<f64>,
    /// Age the active areas over this many cycles before discharging.
    #[arg(long, default_value_t = 0.0)]
    pub cycles: f64,
    /// Duration of one cycle (s).
    #[arg(long, default_value_t = 5400.0)]
    pub t_cycle: f64,
    /// Step for the pre-discharge area aging (s).
    #[arg(long, default_value_t = 100.0)]
    pub aging_dt: f64,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
    /// Re-read and validate the written files.
    #[arg(long)]
    pub verify: bool,
}

#[derive(Debug, Args)]
pub struct IdentifyArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Voltage record, `t_s,voltage_V` or `capacity_Ah,voltage_V`.
    #[arg(long)]
    pub data: PathBuf,
    /// fresh, aged1000 or aged3300.
    #[arg(long)]
    pub phase: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub current: CurrentArgs,
    /// Swarm size (default: config `pso` block or 30).
    #[arg(long)]
    pub swarm: Option<usize>,
    /// Iterations (default: config `pso` block or 150).
    #[arg(long)]
    pub iterations: Option<usize>,
    /// Report path (JSON).
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub verify: bool,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// kprime_n, betaprime_n or both-grid.
    #[arg(long)]
    pub param: String,
    /// Range of the swept coefficient (1/s); `kprime_n` range for a grid.
    #[arg(long)]
    pub min: f64,
    #[arg(long)]
    pub max: f64,
    #[arg(long)]
    pub count: usize,
    /// `betaprime_n` range for a grid (1/s).
    #[arg(long)]
    pub min2: Option<f64>,
    #[arg(long)]
    pub max2: Option<f64>,
    #[arg(long)]
    pub count2: Option<usize>,
    #[arg(long, default_value_t = 3300.0)]
    pub cycles: f64,
    #[arg(long, default_value_t = 5400.0)]
    pub t_cycle: f64,
    #[arg(long, default_value_t = 100.0)]
    pub aging_dt: f64,
    #[command(flatten)]
    pub current: CurrentArgs,
    #[arg(long)]
    pub cutoff: Option<f64>,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub verify: bool,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub phase: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Standard deviation of the added voltage noise (mV).
    #[arg(long, default_value_t = 1.0)]
    pub noise_mv: f64,
    /// Sampling interval (s).
    #[arg(long, default_value_t = 60.0)]
    pub interval: f64,
    #[command(flatten)]
    pub current: CurrentArgs,
    #[arg(long)]
    pub cutoff: Option<f64>,
    /// Dataset path (CSV).
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub verify: bool,
}
