mod figures;
mod fncmd;
mod out;
mod solve;
mod tm;
mod verify;

use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};

/// Certified tanh-network constructions, discrete ODE solving and analytic Turing machine
/// simulation.
#[derive(Parser, Debug)]
#[command(name = "odem", version)]
struct Cli {
    /// Seed for every randomized sweep.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sweep a library function over a dyadic grid and write a CSV.
    Fn(fncmd::FnArgs),
    /// Solve a linear discrete ODE described in a system file.
    Solve(solve::SolveArgs),
    /// Turing machine simulation.
    #[command(subcommand)]
    Tm(tm::TmCommand),
    /// Run the verification suites and print a summary table.
    Verify(verify::VerifyArgs),
    /// Write the data behind the function plots.
    Figures(figures::FiguresArgs),
}

/// Outcome of a successful command run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Ok,
    VerificationFailed,
}

fn configure_threads() -> anyhow::Result<()> {
    let Ok(raw) = std::env::var("ODEM_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .with_context(|| format!("ODEM_THREADS must be a positive integer, got `{raw}`"))?;
    if n == 0 {
        bail!("ODEM_THREADS must be a positive integer, got 0");
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .context("configuring the thread pool")?;
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<Status> {
    match cli.command {
        Command::Fn(args) => fncmd::run(&args),
        Command::Solve(args) => solve::run(&args),
        Command::Tm(cmd) => tm::run(&cmd, cli.seed),
        Command::Verify(args) => verify::run(&args, cli.seed),
        Command::Figures(args) => figures::run(&args),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Err(e) = configure_threads() {
        eprintln!("error: {e:#}");
        return ExitCode::from(2);
    }
    match run(cli) {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::VerificationFailed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
