// Copyright 2026 The ht-secrecy Authors
// SPDX-License-Identifier: Apache-2.0

//! Library half of the `ht-secrecy` binary: config parsing and the
//! `region`, `evaluate` and `simulate` commands, each returning its CSV and
//! JSON outputs as strings.

// `!(x > 0.0)` style guards are kept because they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod format;

use std::path::Path;

pub use commands::{cmd_evaluate, cmd_region, cmd_simulate, CommandOutput};
pub use config::{load_config, parse_config, RunConfig};

/// Bumped whenever a CSV header or JSON summary field changes meaning.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(config::FieldError),
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Core(#[from] ht_secrecy_core::Error),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl CliError {
    /// 3 for numerical failures, 2 for everything the user can fix.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Numerical(_) | CliError::Core(ht_secrecy_core::Error::Numerical(_)) => 3,
            _ => 2,
        }
    }
}

/// Writes `<prefix>.csv` and `<prefix>.json` into `dir`, or the CSV to
/// stdout and the JSON to stderr when no directory is given.
pub fn emit(out: &CommandOutput, dir: Option<&Path>, prefix: &str) -> Result<(), CliError> {
    match dir {
        Some(dir) => {
            let io = |e: std::io::Error| CliError::Io(format!("{}: {e}", dir.display()));
            std::fs::create_dir_all(dir).map_err(io)?;
            if let Some(csv) = &out.csv {
                std::fs::write(dir.join(format!("{prefix}.csv")), csv).map_err(io)?;
            }
            std::fs::write(dir.join(format!("{prefix}.json")), &out.json).map_err(io)?;
        }
        None => {
            if let Some(csv) = &out.csv {
                print!("{csv}");
                eprintln!("{}", out.json);
            } else {
                println!("{}", out.json);
            }
        }
    }
    Ok(())
}
