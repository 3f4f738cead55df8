use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use maxwell_hmm::{run, Command, RunConfig};

#[derive(Parser, Debug)]
#[command(name = "maxwell-hmm", version, about = "Two-scale Maxwell scattering by high-contrast periodic media")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    /// JSON configuration file; defaults apply to missing keys.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Worker threads for sweeps and studies.
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,
    /// Wavenumber override.
    #[arg(long, global = true)]
    k: Option<f64>,
    /// Macro and micro resolution override (cells per axis).
    #[arg(long = "mesh-n", global = true)]
    mesh_n: Option<usize>,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Cmd {
    /// Cell problems and effective tensors.
    Cell,
    /// Sweep of mu_hom over a wavenumber grid.
    Musweep,
    /// Effective macroscopic scattering solve.
    Solve,
    /// Full HMM solve with corrector reconstruction.
    Hmm,
    /// Convergence study against a fine reference.
    Study,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = match &cli.config {
        Some(path) => RunConfig::load(path),
        None => Ok(RunConfig::default()),
    };
    let result = config.and_then(|mut config| {
        config.apply_overrides(cli.k, cli.mesh_n);
        let command = match cli.command {
            Cmd::Cell => Command::Cell,
            Cmd::Musweep => Command::MuSweep,
            Cmd::Solve => Command::Solve,
            Cmd::Hmm => Command::Hmm,
            Cmd::Study => Command::Study,
        };
        run(command, &config, &cli.out, cli.threads)
    });
    match result {
        Ok(outcome) => {
            print!("{}", outcome.report);
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
