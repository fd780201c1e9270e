//! `defectloc` command-line driver.

mod commands;
mod config;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::RunConfig;
use defectloc::Error;

#[derive(Parser)]
#[command(
    name = "defectloc",
    version,
    about = "Localize defects in a known medium from far-field data"
)]
struct Cli {
    /// TOML run configuration; built-in defaults when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the configured noise seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads, 0 for all cores.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the forward problem for both media and write far-field files.
    Synthesize,
    /// Build the indicator map from two far-field files.
    Reconstruct {
        farfield_n0: Option<PathBuf>,
        farfield_n1: Option<PathBuf>,
    },
    /// Summarize a map CSV.
    Report { map: PathBuf },
}

fn exit_code(e: &Error) -> (u8, &'static str) {
    match e {
        Error::Config(_) => (2, "config"),
        Error::Solver { .. } => (3, "solver"),
        Error::Domain(_) | Error::DegenerateConstraint(_) | Error::DimensionMismatch { .. } => (3, "numeric"),
        Error::Parse { .. } => (4, "parse"),
        Error::EmptyMap => (4, "empty_map"),
        Error::Io(_) => (4, "io"),
    }
}

fn load_config(cli: &Cli) -> Result<RunConfig, Error> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: Cli) -> Result<(), Error> {
    if cli.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
            .map_err(|e| Error::Config(e.to_string()))?;
    }
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match &cli.command {
        Command::Synthesize => commands::synthesize(&load_config(&cli)?, &mut out),
        Command::Reconstruct {
            farfield_n0,
            farfield_n1,
        } => commands::run_reconstruct(&load_config(&cli)?, farfield_n0.clone(), farfield_n1.clone(), &mut out),
        Command::Report { map } => {
            let cfg = if cli.config.is_some() {
                Some(load_config(&cli)?)
            } else {
                None
            };
            commands::report(map, cfg.as_ref(), &mut out)
        }
    }?;
    out.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let (code, kind) = exit_code(&e);
            eprintln!("error: kind={kind} code={code} message={:?}", e.to_string());
            ExitCode::from(code)
        }
    }
}
