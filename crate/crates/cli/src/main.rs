//! `graphbus`: experiment harness for the entangling-bus simulator.
//!
//! Every command writes a table (CSV or JSON) whose header echoes the fully
//! resolved configuration. Exit codes: 0 all checks pass, 1 a check failed,
//! 2 invalid input, 3 resource limit.

mod commands;
mod config;
mod error;
mod report;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use graphbus::bhm::NoiseModel;
use graphbus::graph::{Engine, ScheduleMode};

use crate::config::{ConfigFile, FloatList, SeedList};
use crate::error::CliError;
use crate::report::Format;

#[derive(Parser, Debug)]
#[command(name = "graphbus", version, about = "Graph-state generation with a mirror-inverting spin-chain bus")]
struct Cli {
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// csv | json
    #[arg(long, global = true)]
    format: Option<Format>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (0 = all cores). Never changes results.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Flat `key = value` file; command-line flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Single-particle transfer amplitudes at the inversion time.
    MirrorCheck(MirrorArgs),
    /// Bus propagator versus the all-pairs CZ circuit with reversal.
    CircuitEquiv(QubitArgs),
    /// Partially filled bus versus the reduced circuit on random subsets.
    Reduction(ReductionArgs),
    /// Compile a graph into bus cycles, simulate and verify the graph state.
    GraphRun(GraphArgs),
    /// Many-body Fock-state phase law against exact evolution.
    FockCheck(MirrorArgs),
    /// Bose-Hubbard fidelity of the effective spin chain.
    FidelitySweep(SweepArgs),
    /// Fidelity sweep with noise defaults (U/T 8..30, delta 0,1,5 %, seeds 1..10).
    NoiseSweep(SweepArgs),
    /// Fast end-to-end consistency checks.
    Selftest,
}

#[derive(Args, Debug)]
struct MirrorArgs {
    #[arg(long)]
    sites: Option<usize>,
    /// Coupling scale J.
    #[arg(long)]
    j: Option<f64>,
    /// Uniform field B (default: resonant S J).
    #[arg(long, allow_negative_numbers = true)]
    field: Option<f64>,
}

#[derive(Args, Debug)]
struct QubitArgs {
    #[arg(long)]
    qubits: Option<usize>,
}

#[derive(Args, Debug)]
struct ReductionArgs {
    #[arg(long)]
    qubits: Option<usize>,
    #[arg(long)]
    trials: Option<usize>,
}

#[derive(Args, Debug)]
struct GraphArgs {
    /// Edge-list file (`vertices n` then `u v` per line, 1-based).
    #[arg(long, conflicts_with = "random")]
    graph: Option<PathBuf>,
    /// Use an Erdos-Renyi graph on this many vertices, drawn from --seed.
    #[arg(long)]
    random: Option<usize>,
    #[arg(long)]
    edge_prob: Option<f64>,
    /// strict | optimized | edgewise
    #[arg(long)]
    mode: Option<ScheduleMode>,
    /// circuit | hamiltonian
    #[arg(long)]
    engine: Option<Engine>,
    #[arg(long)]
    bus_sites: Option<usize>,
    /// Place qubits on random bus sites drawn from --seed.
    #[arg(long)]
    random_placement: bool,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[arg(long)]
    sites: Option<usize>,
    /// List: `26`, `8,16,26` or `8:30:2`.
    #[arg(long)]
    u_over_t: Option<FloatList>,
    /// Noise strengths in percent, same list syntax.
    #[arg(long)]
    delta: Option<FloatList>,
    /// Noise seeds (default: --seed), e.g. `1:10`.
    #[arg(long)]
    seeds: Option<SeedList>,
    #[arg(long)]
    n_max: Option<usize>,
    /// ou | increment
    #[arg(long)]
    noise_model: Option<NoiseModel>,
    /// Noise correlation time (default tau / 100).
    #[arg(long)]
    correlation_time: Option<f64>,
    /// Noise update interval (default tau / 1000).
    #[arg(long)]
    update_interval: Option<f64>,
    /// Baseline lattice depth in recoils.
    #[arg(long)]
    base_depth: Option<f64>,
    #[arg(long)]
    dim_cap: Option<usize>,
}

pub(crate) const GLOBAL_KEYS: [&str; 4] = ["seed", "format", "output", "threads"];

fn run(cli: Cli) -> Result<bool, CliError> {
    let file = match &cli.config {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::default(),
    };
    let seed = file.resolve(cli.seed, "seed", 0u64)?;
    let format = file.resolve(cli.format, "format", Format::Csv)?;
    let output = file.resolve_opt(cli.output, "output")?;
    let threads = file.resolve(cli.threads, "threads", 0usize)?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Invalid(format!("thread pool: {e}")))?;

    let g = commands::Globals { seed };
    let report = match cli.command {
        Command::MirrorCheck(a) => commands::mirror_check(&a, &file, &g)?,
        Command::CircuitEquiv(a) => commands::circuit_equiv(&a, &file, &g)?,
        Command::Reduction(a) => commands::reduction(&a, &file, &g)?,
        Command::GraphRun(a) => commands::graph_run(&a, &file, &g)?,
        Command::FockCheck(a) => commands::fock_check(&a, &file, &g)?,
        Command::FidelitySweep(a) => commands::sweep(&a, &file, &g, commands::SweepKind::Fidelity)?,
        Command::NoiseSweep(a) => commands::sweep(&a, &file, &g, commands::SweepKind::Noise)?,
        Command::Selftest => commands::selftest(&file, &g)?,
    };
    let text = report.render(format);
    match output {
        Some(path) => std::fs::write(&path, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(report.pass)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("graphbus: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
