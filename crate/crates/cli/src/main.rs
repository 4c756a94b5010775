//! `fuzzy-dsr`: prepare data, train, and evaluate fuzzy rule search runs.

mod commands;
mod config;

use std::path::PathBuf;

use anyhow::Result;
use clap::{Parser, Subcommand};

use config::{Overrides, RunConfig, SynthSpec};

#[derive(Parser)]
#[command(name = "fuzzy-dsr", version, about = "Fuzzy-logic rule search for fraud detection")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Engineer, split, perturb and fuzzify the data source.
    Prepare {
        #[arg(short, long)]
        config: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Train every (method, seed) pair on the prepared training split.
    Train {
        #[arg(short, long)]
        config: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Score trained runs on the test split and export the Pareto front.
    Evaluate {
        #[arg(short, long)]
        config: PathBuf,
        /// Results directory [default: <out>/results].
        #[arg(long)]
        results: Option<PathBuf>,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Write a synthetic PaySim-schema CSV.
    Synth {
        #[arg(long, default_value_t = 10_000)]
        rows: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0.0013)]
        fraud_rate: f64,
        /// Label with the built-in planted rule.
        #[arg(long)]
        planted: bool,
        #[arg(short, long)]
        out: PathBuf,
    },
}

fn load(path: &std::path::Path, overrides: &Overrides) -> Result<RunConfig> {
    let mut cfg = RunConfig::load(path)?;
    cfg.apply(overrides);
    cfg.validate()?;
    Ok(cfg)
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match Cli::parse().command {
        Command::Prepare { config, overrides } => commands::cmd_prepare(&load(&config, &overrides)?),
        Command::Train { config, overrides } => commands::cmd_train(&load(&config, &overrides)?),
        Command::Evaluate { config, results, overrides } => {
            commands::cmd_evaluate(&load(&config, &overrides)?, results.as_deref())
        }
        Command::Synth { rows, seed, fraud_rate, planted, out } => {
            commands::cmd_synth(&SynthSpec { rows, seed, fraud_rate, planted }, &out)
        }
    }
}
