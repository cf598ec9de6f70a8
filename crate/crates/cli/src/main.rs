mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use horobowtie::dl::DEFAULT_VERTEX_BUDGET;
use horobowtie::GeomError;

#[derive(Parser, Debug)]
#[command(
    name = "horobowtie",
    version,
    about = "Horospherical products: oracles, censuses, bound sweeps and boundaries"
)]
struct Cli {
    #[command(flatten)]
    global: Global,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Product norm: l1, l2, ..., linf.
    #[arg(long, global = true, default_value = "l1")]
    pub norm: String,

    /// Hyperbolicity constant override (integer, ratio or decimal, >= 1).
    #[arg(long, global = true)]
    pub delta: Option<String>,

    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Report file; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Vertex budget for generated balls.
    #[arg(long, global = true, default_value_t = DEFAULT_VERTEX_BUDGET)]
    pub budget: usize,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exhaustive census of a Diestel-Leader ball.
    DlCensus(commands::CensusArgs),
    /// Coarse, oracle and built-path distances between two points.
    Distance(commands::PairArgs),
    /// The explicit five-piece path between two points.
    Path(commands::PairArgs),
    /// Shape and type of the geodesics (or built path) between two points.
    Classify(commands::ClassifyArgs),
    /// Capped-path sweep on the plane with bound certificates.
    BoundsSweep(commands::SweepArgs),
    /// Boundary cells and asymptotic classes of sampled vertical rays.
    Boundary(commands::BoundaryArgs),
}

/// Verdict of a command that ran to completion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

fn code_for(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<GeomError>() {
        Some(GeomError::Inconclusive(_)) => 3,
        Some(GeomError::Integrity(_)) => 1,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let g = &cli.global;
    let run = match &cli.command {
        Command::DlCensus(a) => commands::dl_census(g, a),
        Command::Distance(a) => commands::distance(g, a),
        Command::Path(a) => commands::path(g, a),
        Command::Classify(a) => commands::classify(g, a),
        Command::BoundsSweep(a) => commands::bounds_sweep(g, a),
        Command::Boundary(a) => commands::boundary(g, a),
    };
    match run {
        Ok(Verdict::Pass) => ExitCode::SUCCESS,
        Ok(Verdict::Fail) => ExitCode::from(1),
        Ok(Verdict::Inconclusive) => ExitCode::from(3),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(code_for(&e))
        }
    }
}
