//! Command-line front end for the `svsim` simulator: gate benchmarks,
//! circuit execution and VQE runs.

pub mod bench;
mod error;
pub mod run;
pub mod vqe;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use svsim::simd::KernelTier;

pub use bench::{cmd_bench, collect_bench, BenchConfig, BenchRecord};
pub use error::{CliError, CliResult};
pub use run::{cmd_run, RunConfig};
pub use vqe::{cmd_vqe, Ansatz, Init, VqeConfig, VqeOutput};

pub(crate) fn read_file(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

fn parse_tier(s: &str) -> Result<KernelTier, String> {
    s.parse().map_err(|e: svsim::SimError| e.to_string())
}

#[derive(Debug, Parser)]
#[command(name = "svsim", version, about = "State-vector simulator driver")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Time one gate on every target index (or ordered index tuple).
    Bench(BenchArgs),
    /// Execute a `.qc` circuit and print a JSON report.
    Run(RunArgs),
    /// Minimize a `.ham` Hamiltonian with gradient descent.
    Vqe(VqeArgs),
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Gate name, or `noop` to time the harness alone.
    #[arg(long)]
    pub gate: String,
    #[arg(long)]
    pub qubits: usize,
    /// Comma-separated kernel tiers: scalar, vector256, vector512.
    #[arg(long, value_delimiter = ',', default_value = "scalar", value_parser = parse_tier)]
    pub tiers: Vec<KernelTier>,
    /// Comma-separated thread counts.
    #[arg(long, value_delimiter = ',', default_value = "1")]
    pub threads: Vec<usize>,
    #[arg(long, default_value_t = 5)]
    pub reps: usize,
    /// Use non-temporal stores in the vector kernels.
    #[arg(long)]
    pub streaming: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Circuit file.
    pub circuit: PathBuf,
    #[arg(long)]
    pub shots: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Pauli word to measure, e.g. "Z0 X1"; repeatable.
    #[arg(long = "observable")]
    pub observables: Vec<String>,
    /// Hamiltonian file whose expectation value is reported.
    #[arg(long)]
    pub ham: Option<PathBuf>,
    /// Split the state over this many shards.
    #[arg(long)]
    pub shards: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
    /// Route gates through this kernel tier and report each dispatch.
    #[arg(long, value_parser = parse_tier)]
    pub tier: Option<KernelTier>,
    /// Report probabilities even when samples or observables are requested.
    #[arg(long)]
    pub probs: bool,
    /// Marginalize probabilities onto these wires.
    #[arg(long, value_delimiter = ',')]
    pub wires: Option<Vec<usize>>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct VqeArgs {
    /// Hamiltonian file.
    pub hamiltonian: PathBuf,
    /// singles-doubles or strongly-entangling:L
    #[arg(long, default_value = "singles-doubles")]
    pub ansatz: Ansatz,
    #[arg(long)]
    pub electrons: Option<usize>,
    #[arg(long, default_value_t = 50)]
    pub steps: usize,
    #[arg(long, default_value_t = 0.2)]
    pub lr: f64,
    /// Gradient workers; defaults to SVSIM_BWD_BATCH or the core count.
    #[arg(long)]
    pub workers: Option<usize>,
    /// Hamiltonian terms per work item.
    #[arg(long)]
    pub batch_size: Option<usize>,
    /// Forward-pass kernel threads; defaults to SVSIM_FWD_BATCH or 1.
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long, value_enum, default_value_t = InitArg::Zero)]
    pub init: InitArg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InitArg {
    Zero,
    Random,
}

fn write_bench(args: BenchArgs, out: &mut dyn Write) -> CliResult<()> {
    let cfg = BenchConfig {
        gate: args.gate,
        n_qubits: args.qubits,
        tiers: args.tiers,
        threads: args.threads,
        reps: args.reps,
        streaming: args.streaming,
        seed: args.seed,
    };
    match args.format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            cmd_bench(&cfg, |r| {
                w.serialize(&r)?;
                Ok(())
            })?;
            w.flush()?;
        }
        Format::Json => {
            let records = collect_bench(&cfg)?;
            serde_json::to_writer_pretty(&mut *out, &records)?;
            writeln!(out)?;
        }
    }
    Ok(())
}

fn write_vqe(args: VqeArgs, out: &mut dyn Write) -> CliResult<()> {
    let cfg = VqeConfig {
        hamiltonian: args.hamiltonian,
        ansatz: args.ansatz,
        electrons: args.electrons,
        steps: args.steps,
        learning_rate: args.lr,
        workers: args.workers,
        batch_size: args.batch_size,
        forward_threads: args.threads,
        init: match args.init {
            InitArg::Zero => Init::Zero,
            InitArg::Random => Init::Random,
        },
        seed: args.seed,
    };
    let report = cmd_vqe(&cfg)?;
    match args.format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut *out);
            for row in &report.rows {
                w.serialize(row)?;
            }
            w.flush()?;
            drop(w);
            eprintln!("final_energy={:.12}", report.final_energy);
        }
        Format::Json => {
            serde_json::to_writer_pretty(&mut *out, &report)?;
            writeln!(out)?;
        }
    }
    if !report.increases.is_empty() {
        eprintln!(
            "warning: energy increased at step(s) {:?}",
            report.increases
        );
    }
    Ok(())
}

/// Runs one parsed command, writing its report to `out`.
pub fn execute(cli: Cli, out: &mut dyn Write) -> CliResult<()> {
    match cli.command {
        Command::Bench(args) => write_bench(args, out),
        Command::Run(args) => {
            if args.format == Format::Csv {
                return Err(CliError::Usage("run reports are JSON only".into()));
            }
            let cfg = RunConfig {
                circuit: args.circuit,
                shots: args.shots,
                seed: args.seed,
                observables: args.observables,
                hamiltonian: args.ham,
                shards: args.shards,
                threads: args.threads,
                tier: args.tier,
                probabilities: args.probs,
                wires: args.wires,
            };
            let report = cmd_run(&cfg)?;
            serde_json::to_writer_pretty(&mut *out, &report)?;
            writeln!(out)?;
            Ok(())
        }
        Command::Vqe(args) => write_vqe(args, out),
    }
}

/// Parses `argv` and runs it; returns the process exit code.
pub fn main_with_args<I, T>(argv: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return code;
        }
    };
    match execute(cli, out) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}
