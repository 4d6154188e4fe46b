//! `p3`: root and pole expansions of the third Painlevé equation, numerical
//! integration across roots, and the verification suite.

mod commands;
mod config;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::commands::Failure;
use crate::config::{Flags, RunConfig};

#[derive(Debug, Parser)]
#[command(name = "p3", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Command {
    /// Root series to the given order
    ExpandRoot,
    /// Laurent expansion at the pole where t/λ has the given root
    ExpandPole,
    /// Dense solution over --span
    Integrate,
    /// Roots of the solution with λ^III
    FindRoots,
    /// λ^III at the roots of the solution
    Lam3,
    /// Residual of the equation along the solution
    Residual,
    /// Largest deviation from the λ ↦ t/λ symmetry
    Symmetry,
    /// Run every acceptance check
    Verify,
    /// Convergence bounds of the root series
    Bounds,
    /// Regenerate the worked example's figure data into --out
    ReproduceAppendix,
}

fn run(cmd: Command, cfg: &RunConfig) -> Result<(), Failure> {
    match cmd {
        Command::ExpandRoot => commands::expand_root(cfg),
        Command::ExpandPole => commands::expand_pole(cfg),
        Command::Integrate => commands::integrate(cfg),
        Command::FindRoots => commands::find_roots_cmd(cfg),
        Command::Lam3 => commands::lam3(cfg),
        Command::Residual => commands::residual(cfg),
        Command::Symmetry => commands::symmetry(cfg),
        Command::Verify => commands::verify(cfg),
        Command::Bounds => commands::bounds(cfg),
        Command::ReproduceAppendix => commands::reproduce_appendix(cfg),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("P3_LOG", "error")).init();
    let cli = Cli::parse();
    let result = RunConfig::resolve(&cli.flags)
        .map_err(Failure::from)
        .and_then(|cfg| run(cli.command, &cfg));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Io(e)) if e.kind() == std::io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("p3: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
