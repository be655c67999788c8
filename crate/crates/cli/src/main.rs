// Copyright 2026 The ht-secrecy Authors
// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ht_secrecy_cli::{cmd_evaluate, cmd_region, cmd_simulate, emit, load_config, CliError};

/// Error exponents and scheme simulations for hypothesis testing against
/// independence under eavesdropper equivocation constraints.
#[derive(Parser)]
#[command(name = "ht-secrecy", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep the optimal and baseline exponents over a rate grid.
    Region {
        #[arg(long)]
        config: PathBuf,
        /// Output directory; defaults to `output.dir` or stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate one auxiliary channel.
    Evaluate {
        #[arg(long)]
        config: PathBuf,
        /// JSON matrix P(u|x), rows indexed by x.
        #[arg(long)]
        aux: PathBuf,
    },
    /// Simulate the likelihood-encoder scheme over a list of blocklengths.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("HT_SECRECY_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw.trim().parse().ok().filter(|&t| t >= 1).ok_or_else(|| {
        CliError::Io(format!(
            "HT_SECRECY_THREADS={raw:?} is not a positive integer"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Io(e.to_string()))
}

fn run(cli: Cli) -> Result<(), CliError> {
    configure_threads()?;
    match cli.command {
        Command::Region { config, out } => {
            let cfg = load_config(&config)?;
            let dir = out.or_else(|| cfg.output.dir.clone().map(PathBuf::from));
            let prefix = cfg.output.prefix.clone().unwrap_or_else(|| "region".into());
            emit(&cmd_region(&cfg)?, dir.as_deref(), &prefix)
        }
        Command::Evaluate { config, aux } => {
            let cfg = load_config(&config)?;
            emit(&cmd_evaluate(&cfg, &aux)?, None, "evaluate")
        }
        Command::Simulate { config, out } => {
            let cfg = load_config(&config)?;
            let dir = out.or_else(|| cfg.output.dir.clone().map(PathBuf::from));
            let prefix = cfg
                .output
                .prefix
                .clone()
                .unwrap_or_else(|| "simulate".into());
            emit(&cmd_simulate(&cfg)?, dir.as_deref(), &prefix)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
