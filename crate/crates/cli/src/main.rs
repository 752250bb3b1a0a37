use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fracdrift_cli::config::Overrides;
use fracdrift_cli::{execute, Command, Invocation, EXIT_USAGE};

#[derive(Parser)]
#[command(name = "fracdrift", version, about = "Exponent curves, semigroup audits and SDE runs for the fractional Hardy drift")]
struct Args {
    #[command(subcommand)]
    command: Sub,
    /// TOML run configuration; defaults are used for anything it omits.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides output.directory).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Random seed (overrides mc.seed).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for Monte Carlo runs.
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand, Clone, Copy)]
enum Sub {
    /// β(κ) over a log-spaced coupling range.
    BetaCurve,
    /// Residual of the Lyapunov identity at the configured radii.
    Lyapunov,
    /// Heat kernel bound near the singularity.
    KernelBound,
    /// Gradient, ε-Cauchy, L^r contraction and Sobolev checks on the grid.
    Convergence,
    /// Knot values of the weight profile and the B2 exponent.
    Weights,
    /// Particle simulation and the small-radius density exponent.
    Sde,
    /// Full audit; exits with 1 if any check fails.
    VerifyAll,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let command = match args.command {
        Sub::BetaCurve => Command::BetaCurve,
        Sub::Lyapunov => Command::Lyapunov,
        Sub::KernelBound => Command::KernelBound,
        Sub::Convergence => Command::Convergence,
        Sub::Weights => Command::Weights,
        Sub::Sde => Command::Sde,
        Sub::VerifyAll => Command::VerifyAll,
    };
    let inv = Invocation {
        command,
        config: args.config,
        overrides: Overrides { out: args.out, seed: args.seed },
        threads: args.threads,
    };
    match execute(&inv) {
        Ok(summary) => {
            for line in &summary.lines {
                println!("{line}");
            }
            for path in &summary.written {
                eprintln!("wrote {}", path.display());
            }
            ExitCode::from(summary.exit_code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_USAGE as u8)
        }
    }
}
