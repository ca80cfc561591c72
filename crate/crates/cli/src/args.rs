use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "cfcomm",
    version,
    about = "Nested-Zeno counterfactual communication simulator"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact and/or Monte Carlo run of one scenario for one logic value.
    Simulate(SimulateArgs),
    /// Send a PBM bitmap pixel by pixel and write the reconstruction.
    Transmit(TransmitArgs),
    /// Path-sum decomposition of detector amplitudes into channel classes.
    Audit(AuditArgs),
    /// Sweep and optimize the half-mirror reflectivity.
    OptimizeMirror(OptimizeArgs),
    /// Visibility time series under phase drift, with or without the lock.
    LockDemo(LockArgs),
    /// Fit one shared visibility to observed identification rates.
    Calibrate(CalibrateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LogicArg {
    #[value(name = "0")]
    Zero,
    #[value(name = "1")]
    One,
}

#[derive(Debug, Args)]
pub struct ScenarioArg {
    /// Scenario file, or `builtin:NAME` (e.g. `builtin:slaz_m4n2`, `builtin:slaz_ideal(8,2)`).
    pub scenario: String,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub scenario: ScenarioArg,
    #[arg(long, value_enum)]
    pub logic: LogicArg,
    /// Monte Carlo trials; 0 skips sampling.
    #[arg(long, default_value_t = 0)]
    pub trials: u64,
    /// Defaults to the scenario seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Include exact probabilities (always on when no trials are requested).
    #[arg(long)]
    pub exact: bool,
    /// Worker threads for sampling; results do not depend on it.
    #[arg(long)]
    pub workers: Option<usize>,
    /// Add measured wall time to the report (makes output run-dependent).
    #[arg(long)]
    pub wall_time: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PbmArg {
    P1,
    P4,
}

#[derive(Debug, Args)]
pub struct TransmitArgs {
    #[command(flatten)]
    pub scenario: ScenarioArg,
    #[arg(long)]
    pub image: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// ImageStats as JSON.
    #[arg(long)]
    pub stats: Option<PathBuf>,
    /// ImageStats as a one-row CSV.
    #[arg(long)]
    pub stats_csv: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum, default_value = "p1")]
    pub format: PbmArg,
    /// Conclusive outcomes per bit, decided by majority (odd).
    #[arg(long, default_value_t = 1)]
    pub majority: u32,
    #[arg(long, default_value_t = cfcomm_core::protocol::DEFAULT_ATTEMPT_CAP)]
    pub attempt_cap: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SourceArg {
    Heralded,
    Coherent,
}

#[derive(Debug, Args)]
pub struct AuditArgs {
    #[command(flatten)]
    pub scenario: ScenarioArg,
    #[arg(long, value_enum)]
    pub logic: LogicArg,
    #[arg(long, value_enum, default_value = "heralded")]
    pub source: SourceArg,
    /// Mean photon number for `--source coherent`.
    #[arg(long, default_value_t = 1.0)]
    pub mu: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct OptimizeArgs {
    #[arg(long = "M", short = 'M')]
    pub m: u32,
    /// Sweep points between R = 0 and R = 1.
    #[arg(long, default_value_t = 20)]
    pub steps: u32,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct LockArgs {
    /// Steps (one second each).
    #[arg(long, default_value_t = 1500)]
    pub duration: u64,
    /// Drift per step, radians.
    #[arg(long, default_value_t = 0.05)]
    pub sigma: f64,
    #[arg(long, conflicts_with = "unlocked")]
    pub locked: bool,
    #[arg(long)]
    pub unlocked: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.8)]
    pub gain: f64,
    /// Largest correction per update, radians.
    #[arg(long, default_value_t = 0.5)]
    pub actuator_range: f64,
    /// Visibility at zero phase error.
    #[arg(long, default_value_t = 0.99)]
    pub ceiling: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CalibrateArgs {
    #[command(flatten)]
    pub scenario: ScenarioArg,
    #[arg(long, default_value_t = 0.834)]
    pub target0: f64,
    #[arg(long, default_value_t = 0.912)]
    pub target1: f64,
    #[arg(long, default_value_t = 0.02)]
    pub tolerance: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}
