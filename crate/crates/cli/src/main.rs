use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use nonrad_cli::commands::run;
use nonrad_cli::{EXIT_CONFIG, EXIT_OK};

#[derive(Parser)]
#[command(name = "nonrad", version, about = "Radiative and non-radiative parts of classical currents")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Scenario file (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory; overrides `[output] dir`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Seed for randomised checks; overrides `seed` in the scenario.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Relative quadrature tolerance; overrides `quadrature.tol`.
    #[arg(long, global = true)]
    tol: Option<f64>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Label a source radiating or non-radiating and sweep the split.
    Classify,
    /// Photon spectrum and counting statistics.
    EmitSpectrum,
    /// Emission of an orbiting shell against its diameter.
    ShellScan,
    /// Interaction energy of static sources.
    StaticEnergy,
    /// Numerical checks of the propagator identities.
    VerifyPropagator,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Classify => "classify",
            Command::EmitSpectrum => "emit-spectrum",
            Command::ShellScan => "shell-scan",
            Command::StaticEnergy => "static-energy",
            Command::VerifyPropagator => "verify-propagator",
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let Some(config) = cli.config else {
        eprintln!("error: --config is required");
        return ExitCode::from(EXIT_CONFIG as u8);
    };
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(EXIT_CONFIG as u8);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CONFIG as u8);
        }
    }
    match run(cli.command.name(), &config, cli.seed, cli.tol, cli.out) {
        Ok(outcome) => {
            println!("{}", outcome.summary);
            for f in &outcome.files {
                println!("wrote {}", f.display());
            }
            if outcome.exit_code != EXIT_OK {
                eprintln!("{} finished with exit code {}", cli.command.name(), outcome.exit_code);
            }
            ExitCode::from(outcome.exit_code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
