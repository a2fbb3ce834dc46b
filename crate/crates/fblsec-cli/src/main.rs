//! `fblsec`: finite-blocklength physical-layer-security calculator.
//!
//! Subcommands: `compute` (evaluate a fixed design), `optimize` (solve one
//! scheme), `sweep` (grid sweeps or figure presets to CSV), and `verify`
//! (invariant and oracle checks). Scenario configs are flat key=value text or
//! JSON; `_db` keys are converted to linear scale internally.
//!
//! Exit codes: 0 success, 2 validation error, 3 numeric failure,
//! 4 verification failure.

mod commands;
mod config;
mod error;
mod output;
mod presets;
mod sweep;
mod verify;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::{load_config, ScenarioConfig};
use crate::error::CliError;
use crate::output::Table;

#[derive(Parser)]
#[command(name = "fblsec", version, about = "Finite-blocklength physical-layer security designs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ScenarioArgs {
    /// Scenario config file (key=value lines or a JSON object).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Built-in figure sweep (fig2..fig8); `sweep` only.
    #[arg(long)]
    preset: Option<String>,
    /// Seed override for any sampling the command performs.
    #[arg(long)]
    seed: Option<u64>,
    /// Write CSV here instead of printing a table.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// quick (reduced sampling) or full (default sample sizes).
    #[arg(long, default_value = "quick")]
    level: String,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate decoding error, leakage, and throughput for a fixed design.
    Compute(ScenarioArgs),
    /// Solve the configured scheme and print the optimal design point.
    Optimize(ScenarioArgs),
    /// Sweep one or two axes (or run a figure preset) and emit CSV.
    Sweep(ScenarioArgs),
    /// Run the invariant and oracle check suite.
    Verify(VerifyArgs),
}

fn main() {
    init_worker_pool();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Compute(args) => run_scenario(args, commands::cmd_compute),
        Command::Optimize(args) => run_scenario(args, commands::cmd_optimize),
        Command::Sweep(args) => run_sweep(args),
        Command::Verify(args) => run_verify(args),
    };
    if let Err(e) = result {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}

/// Cap the worker pool from FBLSEC_THREADS when set.
fn init_worker_pool() {
    if let Ok(value) = std::env::var("FBLSEC_THREADS") {
        if let Ok(threads) = value.parse::<usize>() {
            if threads >= 1 {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
                return;
            }
        }
        eprintln!("warning: ignoring invalid FBLSEC_THREADS value '{value}'");
    }
}

fn load_scenario(args: &ScenarioArgs) -> Result<(ScenarioConfig, Option<PathBuf>), CliError> {
    let Some(path) = &args.config else {
        return Err(CliError::Validation("missing --config".into()));
    };
    let (mut cfg, cfg_out) = load_config(path)?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    let out = args.out.clone().or(cfg_out.map(PathBuf::from));
    Ok((cfg, out))
}

fn emit(table: Table, out: Option<PathBuf>) -> Result<(), CliError> {
    match out {
        Some(path) => table
            .write_csv(&path)
            .map_err(|e| CliError::Validation(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{}", table.render());
            Ok(())
        }
    }
}

fn run_scenario(
    args: ScenarioArgs,
    cmd: fn(&ScenarioConfig) -> Result<Table, CliError>,
) -> Result<(), CliError> {
    if args.preset.is_some() {
        return Err(CliError::Validation("--preset is only valid with `sweep`".into()));
    }
    let (cfg, out) = load_scenario(&args)?;
    emit(cmd(&cfg)?, out)
}

fn run_sweep(args: ScenarioArgs) -> Result<(), CliError> {
    match (&args.preset, &args.config) {
        (Some(_), Some(_)) => {
            Err(CliError::Validation("use either --preset or --config, not both".into()))
        }
        (Some(name), None) => emit(presets::run_preset(name)?, args.out),
        (None, _) => {
            let (cfg, out) = load_scenario(&args)?;
            emit(sweep::cmd_sweep(&cfg)?, out)
        }
    }
}

fn run_verify(args: VerifyArgs) -> Result<(), CliError> {
    let level = match args.level.as_str() {
        "quick" => verify::Level::Quick,
        "full" => verify::Level::Full,
        other => {
            return Err(CliError::Validation(format!(
                "invalid --level '{other}' (expected quick or full)"
            )))
        }
    };
    verify::cmd_verify(level, args.seed)
}
