//! `cbvp` is the batch front end for the conformable-derivative Dirichlet
//! boundary value solvers.
//!
//! Exit codes: 0 on success, 2 on validation errors (bad flags, config, or
//! function specs), 3 on numerical non-convergence.

mod commands;
mod config;
mod expr;
mod output;

use clap::{Parser, Subcommand};
use std::process::ExitCode;

use config::{CommandArgs, CommandKind};

#[derive(Debug)]
pub enum CliError {
    /// Invalid inputs: exit status 2.
    Validation(String),
    /// The solver ran out of budget: exit status 3 (the run report is still
    /// written).
    NonConvergence(String),
}

#[derive(Parser)]
#[command(
    name = "cbvp",
    version,
    about = "Conformable-derivative Dirichlet boundary value problems: \
             linear and bracketed nonlinear solves, principal eigenvalues, \
             and Lyapunov-type certification"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve T u + y = 0 with u(a) = u(b) = 0
    SolveLinear(CommandArgs),
    /// Solve T u + f(t, u) = 0 inside a verified lower/upper bracket
    SolveNonlinear(CommandArgs),
    /// Principal eigenvalue of T u + lambda u = 0
    Eigen(CommandArgs),
    /// Necessary-condition certificate for T u + q u = 0
    Lyapunov(CommandArgs),
    /// Sample the Green kernel and check its bounds
    Greens(CommandArgs),
    /// Refinement study emitting n,error rows
    Convergence(CommandArgs),
}

impl Command {
    fn split(self) -> (CommandKind, CommandArgs) {
        match self {
            Command::SolveLinear(args) => (CommandKind::SolveLinear, args),
            Command::SolveNonlinear(args) => (CommandKind::SolveNonlinear, args),
            Command::Eigen(args) => (CommandKind::Eigen, args),
            Command::Lyapunov(args) => (CommandKind::Lyapunov, args),
            Command::Greens(args) => (CommandKind::Greens, args),
            Command::Convergence(args) => (CommandKind::Convergence, args),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, args) = cli.command.split();
    let result = args.resolve(kind).and_then(commands::run);
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Validation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::NonConvergence(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
