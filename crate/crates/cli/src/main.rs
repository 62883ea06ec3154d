//! Command-line front end for the three-radical magnetic sensor simulator.
//!
//! Exit codes: 0 success, 1 configuration error, 2 numerical-invariant
//! violation, 3 verification failure.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::CliError;
use config::RunConfig;

#[derive(Parser)]
#[command(
    name = "triradical",
    version,
    about = "Three-radical quantum magnetic sensor under a collisional environment"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Configuration file of `key = value` lines with dotted sections.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Master seed for every random draw.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads (0 = all available cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Output directory.
    #[arg(long, global = true)]
    out: Option<String>,

    /// Override any config key, e.g. --set params.k=0.03 (repeatable).
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Yield scan of one initial state over the (theta, phi) grid.
    Scan,
    /// Random-initial-state sweep with anisotropy and observable yields.
    Sweep,
    /// Swap-interaction demo: mixed system, coherent environments.
    SwapDemo,
    /// Run the commutator certification suite.
    Verify,
    /// Weighted-yield study of the configured observables at one angle.
    Yields,
}

fn resolve_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut overrides: Vec<(String, String)> = Vec::new();
    for kv in cli.set.iter() {
        let Some((k, v)) = kv.split_once('=') else {
            return Err(CliError::Config(format!(
                "--set expects KEY=VALUE, got '{kv}'"
            )));
        };
        overrides.push((k.trim().to_string(), v.trim().to_string()));
    }
    if let Some(seed) = cli.seed {
        overrides.push(("seed".to_string(), seed.to_string()));
    }
    if let Some(threads) = cli.threads {
        overrides.push(("threads".to_string(), threads.to_string()));
    }
    if let Some(out) = &cli.out {
        overrides.push(("out".to_string(), out.clone()));
    }
    RunConfig::load(cli.config.as_deref(), &overrides)
        .map_err(|e| CliError::Config(e.to_string()))
}

fn run() -> Result<(), CliError> {
    let cli = Cli::parse();
    let cfg = resolve_config(&cli)?;
    if cfg.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.threads)
            .build_global()
            .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    }
    match cli.command {
        Command::Scan => commands::cmd_scan(&cfg),
        Command::Sweep => commands::cmd_sweep(&cfg),
        Command::SwapDemo => commands::cmd_swap_demo(&cfg),
        Command::Verify => commands::cmd_verify(&cfg),
        Command::Yields => commands::cmd_yields(&cfg),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
