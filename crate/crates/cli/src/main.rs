//! `lindyn`: classify composition operators, build frequently hypercyclic
//! vector candidates and reproduce the worked examples from the command line.
//!
//! Exit codes: 0 every verdict decided, 2 input or usage error, 3 the report
//! contains unknown verdicts, 4 a certificate could not be settled.

mod commands;
mod config;
mod error;
mod manifest;
mod output;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::affine::AffineArgs;
use commands::br::BrArgs;
use commands::fhc::{ConstructArgs, DensityArgs};
use commands::odometer::OdometerCmd;
use commands::shift::ShiftCmd;
use commands::system::{SystemArg, WindowArgs};
use commands::Ctx;
use config::Config;
use error::CliError;
use manifest::RunManifest;
use output::{Destinations, Outcome};

#[derive(Debug, Parser)]
#[command(name = "lindyn", version, about = "Composition operators on atomic, odometer and affine systems")]
struct Cli {
    #[command(flatten)]
    io: IoArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct IoArgs {
    /// JSON report path (stdout when absent).
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,
    /// CSV data path (defaults to the report path with a .csv extension).
    #[arg(long, global = true, value_name = "FILE")]
    csv: Option<PathBuf>,
    /// SVG plot path, for commands that produce a plot.
    #[arg(long, global = true, value_name = "FILE")]
    svg: Option<PathBuf>,
    /// TOML file overriding the defaults (takes precedence over LINDYN_CONFIG).
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Every verdict with the implication that justifies it.
    Classify(WindowArgs),
    /// Classify f and its inverse and compare the dynamical verdicts.
    ClassifyPair(SystemArg),
    /// Summability of every orbit's measure.
    Sc(SystemArg),
    /// Bounded distortion on a generating wandering set.
    Distortion(WindowArgs),
    /// The sequence d_n(W) and the necessary condition Σ d_n < ∞.
    Dn(WindowArgs),
    /// Truncated frequently hypercyclic vector with density statistics.
    ConstructFhc(ConstructArgs),
    /// Hitting densities of T^n φ near a target.
    Density(DensityArgs),
    /// Exact cylinder computations for the odometer.
    #[command(subcommand)]
    Odometer(OdometerCmd),
    /// The affine map x ↦ ax + b.
    Affine(AffineArgs),
    /// Weighted backward shifts.
    #[command(subcommand)]
    Shift(ShiftCmd),
    /// Sweeps of the density-set sums β_n.
    BrLemma(BrArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Classify(_) => "classify",
            Command::ClassifyPair(_) => "classify-pair",
            Command::Sc(_) => "sc",
            Command::Distortion(_) => "distortion",
            Command::Dn(_) => "dn",
            Command::ConstructFhc(_) => "construct-fhc",
            Command::Density(_) => "density",
            Command::Odometer(_) => "odometer",
            Command::Affine(_) => "affine",
            Command::Shift(_) => "shift",
            Command::BrLemma(_) => "br-lemma",
        }
    }
}

fn dispatch(ctx: &mut Ctx, command: &Command) -> Result<Outcome, CliError> {
    match command {
        Command::Classify(a) => commands::system::classify(ctx, a),
        Command::ClassifyPair(a) => commands::system::classify_pair(ctx, a),
        Command::Sc(a) => commands::system::sc(ctx, a),
        Command::Distortion(a) => commands::system::distortion(ctx, a),
        Command::Dn(a) => commands::system::dn(ctx, a),
        Command::ConstructFhc(a) => commands::fhc::construct(ctx, a),
        Command::Density(a) => commands::fhc::density(ctx, a),
        Command::Odometer(c) => commands::odometer::run(ctx, c),
        Command::Affine(a) => commands::affine::run(ctx, a),
        Command::Shift(c) => commands::shift::run(ctx, c),
        Command::BrLemma(a) => commands::br::run(ctx, a),
    }
}

fn run(cli: Cli) -> Result<u8, CliError> {
    let config = Config::load(cli.io.config.as_deref())?;
    let mut manifest = RunManifest::new(std::env::args().skip(1).collect());
    if let Some((path, hash)) = &config.source {
        manifest.input(format!("config:{}", path.display()), hash.clone());
    }
    let mut ctx = Ctx { defaults: config.defaults, manifest };
    let outcome = dispatch(&mut ctx, &cli.command)?;
    let dest = Destinations { out: cli.io.out, csv: cli.io.csv, svg: cli.io.svg };
    output::emit(cli.command.name(), &ctx.manifest, &outcome, &dest)?;
    Ok(outcome.status.exit_code())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("lindyn: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
