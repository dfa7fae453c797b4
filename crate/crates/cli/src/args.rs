use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use unicorn_core::game::{DeviceMode, InversionMode, Variant};
use unicorn_core::qrng::ThresholdRule;

#[derive(Debug, Parser)]
#[command(name = "unicorn", version, about = "Flying Unicorn on a simulated quantum computer")]
pub struct Cli {
    /// Root seed; drawn from system entropy and printed when absent.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Output path: transcript (play), JSON result (rng, grover),
    /// report directory (bench), bound address (serve).
    #[arg(long, short = 'o', global = true)]
    pub output: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Play the game interactively on stdin/stdout.
    Play(PlayArgs),
    /// Draw random numbers from measured qubits.
    Rng(RngArgs),
    /// Run a Grover search for a secret value.
    Grover(GroverArgs),
    /// Reproduce the experiment tables into report.json / report.csv.
    Bench(BenchArgs),
    /// Start the HTTP game service.
    Serve(ServeArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Simulator,
    Hardware,
}

impl From<ModeArg> for DeviceMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Simulator => DeviceMode::Simulator,
            ModeArg::Hardware => DeviceMode::HardwareEmulation,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    Quantum,
    Classical,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Quantum => Variant::Quantum,
            VariantArg::Classical => Variant::Classical,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InversionArg {
    Raw,
    Linear,
}

impl From<InversionArg> for InversionMode {
    fn from(v: InversionArg) -> Self {
        match v {
            InversionArg::Raw => InversionMode::RawTheta,
            InversionArg::Linear => InversionMode::LinearProbability,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    OneQubit,
    MultiQubit,
    Probabilistic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RuleArg {
    Greater,
    GreaterOrEqual,
}

impl From<RuleArg> for ThresholdRule {
    fn from(r: RuleArg) -> Self {
        match r {
            RuleArg::Greater => ThresholdRule::Greater,
            RuleArg::GreaterOrEqual => ThresholdRule::GreaterOrEqual,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BusyArg {
    Queue,
    Reject,
}

#[derive(Debug, Args)]
pub struct PlayArgs {
    #[arg(long, value_enum, default_value = "simulator")]
    pub mode: ModeArg,
    #[arg(long, value_enum, default_value = "quantum")]
    pub variant: VariantArg,
    #[arg(long, value_enum, default_value = "raw")]
    pub inversion: InversionArg,
    /// Chance of a jewel encounter each turn.
    #[arg(long)]
    pub encounter_prob: Option<f64>,
}

#[derive(Debug, Args)]
pub struct RngArgs {
    #[arg(long, value_enum, default_value = "probabilistic")]
    pub method: MethodArg,
    /// Bits per draw for the one-qubit and multi-qubit methods.
    #[arg(long, default_value_t = 4)]
    pub bits: usize,
    /// Register size for the probabilistic method.
    #[arg(long, default_value_t = 2)]
    pub q: usize,
    #[arg(long, default_value_t = 100)]
    pub shots: u64,
    #[arg(long, value_enum, default_value = "simulator")]
    pub mode: ModeArg,
    #[arg(long, value_enum, default_value = "greater")]
    pub rule: RuleArg,
    /// Number of draws; above 1 prints a frequency table.
    #[arg(long, default_value_t = 1)]
    pub trials: u64,
    /// Print a generated player name instead of a number.
    #[arg(long)]
    pub name: bool,
}

#[derive(Debug, Args)]
pub struct GroverArgs {
    /// Secret in 0..16; drawn from the seed when absent.
    #[arg(long)]
    pub secret: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub iterations: u32,
    #[arg(long, default_value_t = 100)]
    pub shots: u64,
    #[arg(long, value_enum, default_value = "simulator")]
    pub mode: ModeArg,
    /// Readout flip probability; overrides --mode.
    #[arg(long)]
    pub noise_p: Option<f64>,
    /// Run the success-rate sweep over flip probabilities with this many
    /// trials per point.
    #[arg(long)]
    pub sweep: Option<u64>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Smaller sample sizes.
    #[arg(long)]
    pub quick: bool,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long, default_value = "127.0.0.1:8080")]
    pub addr: String,
    /// Mode for games created without one.
    #[arg(long, value_enum, default_value = "simulator")]
    pub mode: ModeArg,
    /// Idle session timeout in seconds.
    #[arg(long, default_value_t = 1800)]
    pub idle_timeout: u64,
    #[arg(long, value_enum, default_value = "queue")]
    pub busy: BusyArg,
    /// Allowed CORS origin; any when absent.
    #[arg(long)]
    pub cors_origin: Option<String>,
}
