//! Command-line front end: band structure, gaps, Zak phases, impedances,
//! interface modes and perturbation sweeps for 1D dispersive layered media.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::Context;
use output::OutDir;

#[derive(Parser)]
#[command(
    name = "bloch1d",
    about = "Band structure and topological interface modes of 1D dispersive layered media",
    version
)]
struct Cli {
    /// TOML run configuration.
    #[arg(long, global = true, default_value = "bloch1d.toml")]
    config: PathBuf,

    /// Output directory for CSV/JSON files.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    /// Cross-check the interface mode against the finite-difference solver.
    #[arg(long, global = true)]
    oracle: bool,

    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Kappa-grid resolution (Wilson loop points for `zak`).
    #[arg(long, global = true)]
    kappa_points: Option<usize>,

    /// Generic resolution knob: samples per cell for `profile`, grid points
    /// per cell for `--oracle`, gap samples for `impedance`, spatial grid
    /// for `zak`.
    #[arg(long, global = true)]
    grid: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Band structure CSV plus gap report.
    Bands,
    /// Gap report only.
    Gaps,
    /// Zak phase of every complete band.
    Zak,
    /// Surface impedances sampled over the tracked gap.
    Impedance,
    /// Locate the interface mode in the tracked gap.
    Interface,
    /// Interface-mode field profile.
    Profile,
    /// Permittivity-perturbation sweep.
    SweepDelta,
    /// Symmetry-perturbation sweep.
    SweepSigma,
    /// Run the invariant suite on this configuration.
    Verify,
}

fn main() -> ExitCode {
    let cli = Cli::parse();

    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: cannot configure {n} threads: {e}");
            return ExitCode::from(1);
        }
    }

    let config = match config::load(&cli.config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("config error: {e}");
            return ExitCode::from(2);
        }
    };
    let structure = match config.structure() {
        Ok(s) => s,
        Err(e) => {
            eprintln!("config error: {e}");
            return ExitCode::from(2);
        }
    };
    let out = match OutDir::new(&cli.out) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: cannot create output directory: {e}");
            return ExitCode::from(1);
        }
    };

    let ctx = Context {
        config: &config,
        tol: config.tolerances(),
        structure,
        out,
        oracle: cli.oracle,
        kappa_points: cli.kappa_points,
        grid: cli.grid,
    };

    let result = match cli.command {
        Command::Bands => commands::cmd_bands(&ctx),
        Command::Gaps => commands::cmd_gaps(&ctx),
        Command::Zak => commands::cmd_zak(&ctx),
        Command::Impedance => commands::cmd_impedance(&ctx),
        Command::Interface => commands::cmd_interface(&ctx),
        Command::Profile => commands::cmd_profile(&ctx),
        Command::SweepDelta => commands::cmd_sweep_delta(&ctx),
        Command::SweepSigma => commands::cmd_sweep_sigma(&ctx),
        Command::Verify => {
            return match commands::cmd_verify(&ctx) {
                Ok(true) => ExitCode::SUCCESS,
                Ok(false) => ExitCode::from(1),
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(1)
                }
            }
        }
    };

    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
