use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;

use chaos_edge::Error;

#[derive(Parser, Debug)]
#[command(name = "chaos-edge", version, about = "Entropy, periods, kneading, renormalization and boundary-of-chaos search for interval maps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Topological entropy by lap growth and, for stunted maps, the Markov partition.
    Entropy(MapArgs),
    /// Periods of periodic orbits up to --bound, with the power-of-two verdict.
    Periods(MapArgs),
    /// Kneading invariant to --depth symbols.
    Kneading(MapArgs),
    /// Shape of the critical values.
    Shape(MapArgs),
    /// Stunted sawtooth map with the same kneading invariant.
    Psi(MapArgs),
    /// Restrictive interval of period --bound and the period-doubling cascade.
    Renorm(MapArgs),
    /// Superstable parameters and Feigenbaum ratios of a family (path descriptor).
    Feigenbaum(MapArgs),
    /// Bracket the zero/positive entropy boundary along a path descriptor.
    Boundary(MapArgs),
    /// Entropy and period summary over a parameter grid on a path descriptor.
    Sweep(SweepArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug, Clone)]
pub struct RunConfig {
    /// Symbol depth, cascade depth, k_max or plateau exponent, depending on the command.
    #[arg(long)]
    pub depth: Option<usize>,
    /// Period ceiling.
    #[arg(long)]
    pub bound: Option<usize>,
    /// Iterates used by the lap-growth estimator.
    #[arg(long)]
    pub n_max: Option<usize>,
    /// Numerical tolerance (Ψ cylinder width, boundary resolution).
    #[arg(long)]
    pub precision: Option<f64>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    /// Seed for sampled points (renorm checks, sweep point clouds).
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Size budget for exact searches (pieces of Tᵖ, partition points).
    #[arg(long)]
    pub budget: Option<usize>,
}

#[derive(Args, Debug)]
struct MapArgs {
    /// Descriptor file; read from stdin when absent or "-".
    input: Option<PathBuf>,
    #[command(flatten)]
    config: RunConfig,
}

#[derive(Args, Debug)]
struct SweepArgs {
    input: Option<PathBuf>,
    /// Number of grid points, endpoints included.
    #[arg(long, default_value_t = 100)]
    grid: usize,
    /// Write the bifurcation point cloud (t,x) as CSV to this file.
    #[arg(long)]
    cloud: Option<PathBuf>,
    #[command(flatten)]
    config: RunConfig,
}

fn read_input(path: &Option<PathBuf>) -> Result<String, Error> {
    let mut text = String::new();
    match path {
        Some(p) if p.as_os_str() != "-" => {
            text = std::fs::read_to_string(p).map_err(|e| Error::Invalid(format!("{}: {e}", p.display())))?;
        }
        _ => {
            std::io::stdin().read_to_string(&mut text).map_err(|e| Error::Invalid(format!("stdin: {e}")))?;
        }
    }
    Ok(text)
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Invalid(_) => 2,
        Error::Precondition(_) => 3,
        Error::Budget(_) | Error::Numerical(_) => 4,
    }
}

fn thread_cap() -> Option<usize> {
    std::env::var("CHAOS_EDGE_THREADS").ok().and_then(|v| v.trim().parse().ok())
}

fn run(cli: Cli) -> Result<String, Error> {
    match cli.command {
        Command::Entropy(a) => commands::entropy(&read_input(&a.input)?, &a.config),
        Command::Periods(a) => commands::periods(&read_input(&a.input)?, &a.config),
        Command::Kneading(a) => commands::kneading(&read_input(&a.input)?, &a.config),
        Command::Shape(a) => commands::shape(&read_input(&a.input)?, &a.config),
        Command::Psi(a) => commands::psi(&read_input(&a.input)?, &a.config),
        Command::Renorm(a) => commands::renorm(&read_input(&a.input)?, &a.config),
        Command::Feigenbaum(a) => commands::feigenbaum(&read_input(&a.input)?, &a.config),
        Command::Boundary(a) => commands::boundary(&read_input(&a.input)?, &a.config),
        Command::Sweep(a) => commands::sweep(&read_input(&a.input)?, a.grid, a.cloud.as_deref(), &a.config),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = chaos_edge::parallel::with_thread_cap(thread_cap(), || run(cli));
    match out {
        Ok(text) => {
            print!("{text}");
            if !text.ends_with('\n') {
                println!();
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("chaos-edge: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
