// `!(x >= 0.0)` style checks are kept on purpose: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use flee_core::sweep::SweepParameter;
use flee_core::Execution;
use log::info;
use serde::Serialize;

use commands::{Artifacts, RunContext};
use config::ExperimentConfig;

/// Name of the resolved configuration written next to the artifacts.
const RESOLVED_CONFIG: &str = "config.resolved.toml";
const MANIFEST: &str = "manifest.json";

#[derive(Parser, Debug)]
#[command(
    name = "flee",
    version,
    about = "Phonon-burst escape experiments for two-hole surface-code qubits"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Experiment configuration (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    /// Overrides the configured seed.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads; 1 runs sequentially.
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Also write a gnuplot script per table.
    #[arg(long, global = true)]
    gnuplot: bool,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Minimum code distance against lattice spacing.
    SweepL,
    /// Minimum code distance against maximum phonon radius.
    SweepRmax,
    /// Minimum code distance against detection latency.
    SweepDelta,
    /// Plan and simulate the escape from one strike on a mapping.
    Simulate,
    /// Failure probability against move time.
    Reliability,
    /// Sweep with seeded random latency and move length per point.
    ReplicatePaper,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::SweepL => "sweep-l",
            Command::SweepRmax => "sweep-rmax",
            Command::SweepDelta => "sweep-delta",
            Command::Simulate => "simulate",
            Command::Reliability => "reliability",
            Command::ReplicatePaper => "replicate-paper",
        }
    }
}

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Range(String),
    Unescapable(String),
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 3,
            CliError::Range(_) => 4,
            CliError::Unescapable(_) => 5,
            CliError::Io(_) => 6,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Range(m) => write!(f, "invalid value: {m}"),
            CliError::Unescapable(m) => write!(f, "no escape plan: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    subcommand: &'static str,
    seed: u64,
    halfway_convention: &'static str,
    scenarios: Vec<&'static str>,
    threads: Option<usize>,
    resolved_config_file: &'static str,
    config: &'a ExperimentConfig,
    config_toml: String,
    artifacts: Artifacts,
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let mut cfg = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if cfg.seed > i64::MAX as u64 {
        return Err(CliError::Range(format!(
            "seed {} exceeds {}",
            cfg.seed,
            i64::MAX
        )));
    }

    let exec = match cli.threads {
        Some(0) => return Err(CliError::Range("--threads must be at least 1".into())),
        Some(1) => Execution::Sequential,
        Some(n) => {
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| CliError::Config(e.to_string()))?;
            Execution::Parallel
        }
        None => Execution::default(),
    };

    // Pin the sweep list so the resolved config replays the same points.
    let sweep_parameter = match cli.command {
        Command::SweepL => Some(SweepParameter::L),
        Command::SweepRmax => Some(SweepParameter::RMax),
        Command::SweepDelta => Some(SweepParameter::Delta),
        Command::ReplicatePaper => Some(cfg.replicate_parameter),
        Command::Simulate | Command::Reliability => None,
    };
    if let Some(parameter) = sweep_parameter {
        cfg.sweep_values = Some(cfg.sweep_values_for(parameter)?);
        cfg.sweep_start = None;
        cfg.sweep_stop = None;
        cfg.sweep_step = None;
    }

    std::fs::create_dir_all(&cli.out)
        .map_err(|e| CliError::Io(format!("{}: {e}", cli.out.display())))?;
    info!("{} -> {}", cli.command.name(), cli.out.display());
    let ctx = RunContext {
        config: &cfg,
        out: &cli.out,
        gnuplot: cli.gnuplot,
        exec,
    };
    let artifacts = match cli.command {
        Command::SweepL => commands::run_sweep(&ctx, SweepParameter::L)?,
        Command::SweepRmax => commands::run_sweep(&ctx, SweepParameter::RMax)?,
        Command::SweepDelta => commands::run_sweep(&ctx, SweepParameter::Delta)?,
        Command::Simulate => commands::run_simulate(&ctx)?,
        Command::Reliability => commands::run_reliability(&ctx)?,
        Command::ReplicatePaper => commands::run_replicate(&ctx)?,
    };

    let config_toml = cfg.to_toml();
    let write = |name: &str, text: &str| {
        std::fs::write(cli.out.join(name), text).map_err(|e| CliError::Io(format!("{name}: {e}")))
    };
    write(RESOLVED_CONFIG, &config_toml)?;
    let manifest = Manifest {
        tool: "flee",
        version: env!("CARGO_PKG_VERSION"),
        subcommand: cli.command.name(),
        seed: cfg.seed,
        halfway_convention: cfg.halfway_convention.as_str(),
        scenarios: cfg.scenario.kinds().iter().map(|k| k.as_str()).collect(),
        threads: cli.threads,
        resolved_config_file: RESOLVED_CONFIG,
        config: &cfg,
        config_toml,
        artifacts,
    };
    let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    write(MANIFEST, &(json + "\n"))?;
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("FLEE_LOG", "warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("flee: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
