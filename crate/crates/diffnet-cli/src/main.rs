use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use diffnet_cli::config::{ExperimentConfig, SCHEMA_HELP};
use diffnet_cli::run_config;

#[derive(Parser)]
#[command(name = "diffnet", about = "Network diffusion experiment runner", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment config and write CSV/SVG outputs plus a manifest.
    Run {
        /// Path to the experiment config (JSON).
        config: PathBuf,
        /// Override the config's base seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the config's output directory.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads for panel/trial parallelism (default: all cores).
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Parse and validate a config without running it.
    Validate {
        config: PathBuf,
    },
    /// Print the config schema.
    Describe,
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Run { config, seed, out, threads } => {
            if let Some(n) = threads {
                if let Err(e) =
                    rayon::ThreadPoolBuilder::new().num_threads(n).build_global()
                {
                    eprintln!("warning: could not set thread count: {e}");
                }
            }
            let mut parsed = match ExperimentConfig::load(&config) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::FAILURE;
                }
            };
            if let Some(s) = seed {
                parsed.seed = s;
            }
            match run_config(&parsed, out.as_deref()) {
                Ok(paths) => {
                    for path in paths {
                        println!("{}", path.display());
                    }
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::FAILURE
                }
            }
        }
        Command::Validate { config } => match ExperimentConfig::load(&config) {
            Ok(c) => {
                println!("ok: {} experiment, seed {}", c.kind.name(), c.seed);
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::FAILURE
            }
        },
        Command::Describe => {
            println!("{SCHEMA_HELP}");
            ExitCode::SUCCESS
        }
    }
}
