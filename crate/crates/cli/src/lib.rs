//! Scenario runner behind the `otable` binary.
//!
//! Every subcommand writes its artifacts plus `report.json` and a
//! `key: value` summary `report.txt` into
//! `--out-dir` and returns the same report. Artifacts never contain paths,
//! timings or other run-dependent data, so a fixed seed gives
//! byte-identical files.

pub mod commands;
pub mod config;
pub mod io;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

pub use config::expand_args;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Core(#[from] otable_core::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {msg}")]
    Format { path: PathBuf, msg: String },
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Core(_) => "core",
            CliError::Io { .. } => "io",
            CliError::Format { .. } => "format",
            CliError::Config(_) => "config",
            CliError::Usage(_) => "usage",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Usage(_) => 2,
            _ => 1,
        }
    }

    /// Machine-readable error record.
    pub fn record(&self) -> Value {
        json!({ "outcome": "error", "kind": self.kind(), "message": self.to_string() })
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "otable", version, about = "Simulate and use quantum-generated one-time tables")]
#[command(args_override_self = true)]
pub struct Cli {
    /// JSON object whose keys mirror the flags; explicit flags win.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Master seed.
    #[arg(long, env = "OTABLE_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Protocol {
    Nland,
    Nland3,
    Nland2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Sides {
    OneSided,
    TwoSided,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BoxMode {
    OneSided,
    Symmetric,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum QheInput {
    Zero,
    Haar,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a protocol many times and write the transcripts and party views.
    GenTables {
        #[arg(long, value_enum, default_value = "nland")]
        protocol: Protocol,
        #[arg(long, default_value_t = 100)]
        n: usize,
        /// honest, honest_but_curious, entangled_input, distinguisher or
        /// declare_failure.
        #[arg(long, default_value = "honest")]
        adversary_a: String,
        /// honest, honest_but_curious, fixed_measurement or custom_sigma.
        #[arg(long, default_value = "honest")]
        adversary_b: String,
        /// Fraction of instances on which Alice's strategy is used.
        #[arg(long, default_value_t = 1.0)]
        alice_fraction: f64,
        #[arg(long, default_value_t = 1.0)]
        bob_fraction: f64,
        #[arg(long, default_value_t = 0.0)]
        eps_noise: f64,
        #[arg(long, default_value_t = 0.0)]
        eps_fail: f64,
        /// Outcome patterns kept by `declare_failure`, e.g. `00`.
        #[arg(long, default_value = "00")]
        keep: Vec<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Sample-check a batch and keep the unrevealed tables.
    Check {
        /// Directory holding `alice.json` and `bob.json`.
        #[arg(long)]
        batch: PathBuf,
        #[arg(long, value_enum, default_value = "one-sided")]
        mode: Sides,
        /// Checks made by Bob.
        #[arg(long)]
        k: usize,
        /// Checks made by Alice (two-sided mode only); defaults to `k`.
        #[arg(long)]
        k_a: Option<usize>,
        /// Tolerated failures; defaults to twice the expected count.
        #[arg(long)]
        threshold: Option<usize>,
        /// Honest per-table error rate used for the default threshold.
        #[arg(long, default_value_t = 0.0)]
        expected_rate: f64,
        #[command(flatten)]
        common: Common,
    },
    /// XOR groups of `k` tables that share Bob's input.
    Combine {
        #[arg(long)]
        batch: PathBuf,
        #[arg(long)]
        k: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Error-reduce a batch with `q` auxiliary tables per target.
    ErrorReduce {
        /// Directory holding `alice.json` and `bob.json`.
        #[arg(long, conflicts_with = "synthetic")]
        batch: Option<PathBuf>,
        /// Instead of a batch, draw this many tables with injected errors.
        #[arg(long)]
        synthetic: Option<usize>,
        #[arg(long, default_value_t = 0.05)]
        inject_rate: f64,
        #[arg(long, default_value_t = 20)]
        q: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Evaluate a boolean netlist with one table per nonlocal AND.
    EvalCircuit {
        #[arg(long)]
        circuit: PathBuf,
        /// Alice's input bits, e.g. `0110`.
        #[arg(long, default_value = "")]
        alice: String,
        #[arg(long, default_value = "")]
        bob: String,
        /// Table source; fresh correct tables from the seed otherwise.
        #[arg(long)]
        batch: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// One-out-of-two oblivious transfer from a single table.
    Ot {
        #[arg(long, value_parser = parse_bit, action = clap::ArgAction::Set)]
        m0: bool,
        #[arg(long, value_parser = parse_bit, action = clap::ArgAction::Set)]
        m1: bool,
        #[arg(long, value_parser = parse_bit, action = clap::ArgAction::Set)]
        choice: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Bit commitment: commit, then reveal (optionally with flipped shares).
    Commit {
        #[arg(long, value_parser = parse_bit, action = clap::ArgAction::Set)]
        bit: bool,
        /// Bob's input string; drawn from the seed (nonzero) when absent.
        #[arg(long)]
        bob_inputs: Option<String>,
        #[arg(long, default_value_t = 4)]
        m: usize,
        /// Pattern Alice XORs into her honest reveal.
        #[arg(long)]
        flip: Option<String>,
        /// Enumerate every flip pattern against every Bob input instead.
        #[arg(long)]
        enumerate: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Sample the noisy nonlocal box built from tables.
    NsBox {
        #[arg(long)]
        e: f64,
        #[arg(long, value_enum, default_value = "one-sided")]
        mode: BoxMode,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Holevo tradeoff scan over Alice's cheating inputs.
    HolevoScan {
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 2)]
        ancilla: usize,
        /// CSV destination; `<out-dir>/scan.csv` by default.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Perturb honest encodings instead of sampling Haar states.
        #[arg(long)]
        endpoint: bool,
        #[arg(long, default_value_t = 0.3)]
        max_delta: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Delegated Clifford+T evaluation with table-backed key updates.
    Qhe {
        #[arg(long)]
        circuit: PathBuf,
        #[arg(long, value_enum, default_value = "haar")]
        input: QheInput,
        #[command(flatten)]
        common: Common,
    },
}

impl Command {
    pub fn common(&self) -> &Common {
        match self {
            Command::GenTables { common, .. }
            | Command::Check { common, .. }
            | Command::Combine { common, .. }
            | Command::ErrorReduce { common, .. }
            | Command::EvalCircuit { common, .. }
            | Command::Ot { common, .. }
            | Command::Commit { common, .. }
            | Command::NsBox { common, .. }
            | Command::HolevoScan { common, .. }
            | Command::Qhe { common, .. } => common,
        }
    }
}

pub fn parse_bit(s: &str) -> std::result::Result<bool, String> {
    match s {
        "0" | "false" => Ok(false),
        "1" | "true" => Ok(true),
        _ => Err(format!("expected 0 or 1, got {s}")),
    }
}

pub fn parse_bits(s: &str) -> Result<Vec<bool>> {
    s.chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            _ => Err(CliError::Usage(format!("bit string {s:?} contains {c:?}"))),
        })
        .collect()
}

/// Runs one parsed command and writes its report.
pub fn execute(cli: Cli) -> Result<Value> {
    let dir = cli.command.common().out_dir.clone();
    io::ensure_dir(&dir)?;
    let report = commands::dispatch(&cli.command)?;
    io::write_json(&dir.join("report.json"), &report)?;
    io::write_summary(&dir.join("report.txt"), &report)?;
    Ok(report)
}

/// Expands `--config`, parses and executes.
pub fn run<I, S>(argv: I) -> Result<Value>
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let args = expand_args(argv.into_iter().map(Into::into).collect())?;
    let cli = Cli::try_parse_from(args).map_err(|e| CliError::Usage(e.to_string().trim_end().to_string()))?;
    execute(cli)
}
