use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use stshapeopt::app::{run, Command, Overrides};

#[derive(Parser)]
#[command(name = "stshapeopt", version, about = "Space-time shape optimization of moving interfaces")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(clap::Args)]
struct Common {
    /// Run configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides `[output] directory`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write VTK snapshots.
    #[arg(long)]
    vtk: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve the state equation once and report J.
    Solve(Common),
    /// Run the shape-gradient descent.
    Optimize(Common),
    /// Compare the adjoint derivative with finite differences.
    CheckGradient(Common),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let (command, common) = match cli.command {
        Cmd::Solve(c) => (Command::Solve, c),
        Cmd::Optimize(c) => (Command::Optimize, c),
        Cmd::CheckGradient(c) => (Command::CheckGradient, c),
    };
    let overrides = Overrides { out: common.out, vtk: common.vtk };
    let code = run(command, &common.config, &overrides, &mut std::io::stdout(), &mut std::io::stderr());
    ExitCode::from(code as u8)
}
