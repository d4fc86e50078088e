use clap::{Parser, Subcommand};
use logstrain::cli::commands::{cmd_compare, cmd_counterexample, cmd_eval, cmd_path, cmd_scan};
use logstrain::cli::config::{CounterexampleConfig, EvalConfig, PathConfig, ScanConfig};
use logstrain::cli::CliError;
use serde::de::DeserializeOwned;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

/// Constitutive-analysis toolkit for finite-strain elasto-plasticity:
/// logarithmic-strain energies, plastic flow formulations and
/// rank-one-convexity scanning.
#[derive(Parser)]
#[command(name = "logstrain", version)]
struct Cli {
    /// JSON config file
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// output directory for CSV/JSON artifacts (default: current directory)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// worker threads for scans (0 = auto)
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    /// seed for randomized scans
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate energy and stresses of a model at one deformation gradient
    Eval,
    /// Sample the simple-shear non-convexity curve by both routes
    Counterexample,
    /// Rank-one-convexity scan over base points
    Scan,
    /// Drive a plastic loading path
    Path,
    /// Run one path under several flow formulations side by side
    Compare,
}

fn load_config<C: DeserializeOwned>(path: Option<&Path>, command: &str) -> Result<C, CliError> {
    let path = path.ok_or_else(|| {
        CliError::Config(format!("`{command}` requires --config <file>"))
    })?;
    let raw = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&raw)
        .map_err(|e| CliError::Config(format!("invalid config {}: {e}", path.display())))
}

fn out_dir(cli: &Cli) -> Result<PathBuf, CliError> {
    let dir = cli.out.clone().unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&dir)
        .map_err(|e| CliError::Io(format!("cannot create {}: {e}", dir.display())))?;
    Ok(dir)
}

fn run(cli: &Cli) -> Result<serde_json::Value, CliError> {
    if cli.threads > 0 {
        // ignore the error if a global pool already exists
        let _ = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global();
    }
    let config = cli.config.as_deref();
    match cli.command {
        Command::Eval => {
            let cfg: EvalConfig = load_config(config, "eval")?;
            cmd_eval(&cfg)
        }
        Command::Counterexample => {
            let cfg: CounterexampleConfig = match config {
                Some(_) => load_config(config, "counterexample")?,
                None => CounterexampleConfig::default(),
            };
            cmd_counterexample(&cfg, &out_dir(cli)?)
        }
        Command::Scan => {
            let cfg: ScanConfig = load_config(config, "scan")?;
            cmd_scan(&cfg, &out_dir(cli)?, cli.seed)
        }
        Command::Path => {
            let cfg: PathConfig = load_config(config, "path")?;
            cmd_path(&cfg, &out_dir(cli)?)
        }
        Command::Compare => {
            let cfg: PathConfig = load_config(config, "compare")?;
            cmd_compare(&cfg, &out_dir(cli)?)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(summary) => {
            println!("{}", serde_json::to_string_pretty(&summary).expect("summaries serialize"));
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
