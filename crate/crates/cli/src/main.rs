use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fieldlab_cli::{Invocation, RunKind, Scenario};

#[derive(Parser)]
#[command(name = "fieldlab", version, about = "Retarded-field, Kirchhoff and scaling runs from TOML scenarios")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Scenario file; every key is optional.
    scenario: Option<PathBuf>,
    /// Output directory (default: `output.dir`, else the current directory).
    #[arg(long, short)]
    out: Option<PathBuf>,
    /// Worker threads; 0 uses every core.
    #[arg(long, env = "FIELDLAB_WORKERS")]
    workers: Option<usize>,
    /// Overrides the scenario's `seed`.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the kind named by the scenario's `run` key (default `field`).
    Run(Common),
    /// Retarded four-potential at observation points.
    Potential(Common),
    /// B and E at observation points.
    Field(Common),
    /// Source term plus boundary term against the direct field.
    Decompose(Common),
    /// Field inside a source-free shell from its two boundary integrals.
    Reconstruct(Common),
    /// Inner and outer shell integrals at an exterior point.
    Cancellation(Common),
    /// Power-law fit over a radial sweep.
    Scaling(Common),
    /// Wave-equation residuals and null initial data.
    Validate(Common),
    /// Print the default scenario.
    Defaults,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { fieldlab_cli::EXIT_CONFIG as u8 } else { 0 });
        }
    };
    let (run, common) = match cli.command {
        Command::Defaults => {
            print!("{}", Scenario::default().to_toml());
            return ExitCode::SUCCESS;
        }
        Command::Run(c) => (None, c),
        Command::Potential(c) => (Some(RunKind::Potential), c),
        Command::Field(c) => (Some(RunKind::Field), c),
        Command::Decompose(c) => (Some(RunKind::Decompose), c),
        Command::Reconstruct(c) => (Some(RunKind::Reconstruct), c),
        Command::Cancellation(c) => (Some(RunKind::Cancellation), c),
        Command::Scaling(c) => (Some(RunKind::Scaling), c),
        Command::Validate(c) => (Some(RunKind::Validate), c),
    };
    let code = fieldlab_cli::run(&Invocation {
        run,
        scenario: common.scenario,
        out_dir: common.out,
        workers: common.workers,
        seed: common.seed,
    });
    ExitCode::from(code as u8)
}
