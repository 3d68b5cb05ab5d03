//! `awafs` — command-line front end for the leaf-spine MLFQ simulator.
//!
//! Exit codes: 0 on success, 2 for configuration/usage problems, 1 for
//! runtime failures (I/O, simulation build errors).

use awafs_sim::config::{self, ConfigError, ScenarioConfig, SchedulerChoice};
use awafs_sim::runner::{execute, RunnerError, RunnerOptions};
use awafs_sim::workload::WorkloadCdf;
use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "awafs",
    about = "Packet-level leaf-spine simulator comparing adaptive and static MLFQ flow scheduling",
    version
)]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario from a preset or a TOML config file.
    Run(RunArgs),
    /// Print a preset's complete configuration as TOML.
    PrintConfig {
        /// Preset name; see `awafs list`.
        #[arg(long)]
        scenario: String,
    },
    /// List available presets and builtin workloads.
    List,
}

#[derive(Args)]
struct RunArgs {
    /// Preset name; see `awafs list`.
    #[arg(long, conflicts_with = "config")]
    scenario: Option<String>,
    /// Path to a scenario TOML file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override traffic.load.
    #[arg(long)]
    load: Option<f64>,
    /// Override the stop rule with a flow count.
    #[arg(long, conflicts_with = "duration")]
    flows: Option<u64>,
    /// Override the stop rule with a duration in seconds.
    #[arg(long)]
    duration: Option<f64>,
    /// Override topology.queues.
    #[arg(long)]
    queues: Option<usize>,
    /// Scheduler arms to run: awafs, static, or both.
    #[arg(long)]
    scheduler: Option<String>,
    /// Override run.seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override run.reps.
    #[arg(long)]
    reps: Option<u32>,
    /// Output directory (default: the config's run.out, or "out").
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    /// Bad configuration or usage: exit 2.
    Config(String),
    /// Everything else: exit 1.
    Runtime(String),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Failure {
        Failure::Config(e.to_string())
    }
}

impl From<RunnerError> for Failure {
    fn from(e: RunnerError) -> Failure {
        match e {
            RunnerError::Config(c) => Failure::Config(c.to_string()),
            other => Failure::Runtime(other.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), Failure> {
    match cli.cmd {
        Command::Run(args) => run(args),
        Command::PrintConfig { scenario } => {
            let cfg = config::preset(&scenario)?;
            print!("{}", cfg.to_toml_string());
            Ok(())
        }
        Command::List => {
            println!("presets:");
            for p in config::PRESETS {
                println!("  {p}");
            }
            println!("builtin workloads:");
            for w in WorkloadCdf::builtin_names() {
                println!("  {w}");
            }
            Ok(())
        }
    }
}

fn run(args: RunArgs) -> Result<(), Failure> {
    let mut cfg: ScenarioConfig = match (&args.scenario, &args.config) {
        (Some(name), None) => config::preset(name)?,
        (None, Some(path)) => ScenarioConfig::load(path)?,
        _ => {
            return Err(Failure::Config(
                "pass exactly one of --scenario <preset> or --config <file>".to_string(),
            ))
        }
    };

    if let Some(load) = args.load {
        cfg.traffic.load = load;
    }
    if let Some(flows) = args.flows {
        cfg.traffic.flow_count = Some(flows);
        cfg.traffic.duration_s = None;
    }
    if let Some(duration) = args.duration {
        cfg.traffic.duration_s = Some(duration);
        cfg.traffic.flow_count = None;
    }
    if let Some(queues) = args.queues {
        cfg.topology.queues = queues;
    }
    if let Some(sched) = &args.scheduler {
        cfg.run.scheduler = Some(match sched.as_str() {
            "awafs" => SchedulerChoice::Awafs,
            "static" => SchedulerChoice::Static,
            "both" => SchedulerChoice::Both,
            other => {
                return Err(Failure::Config(format!(
                    "unknown scheduler {other:?}: expected awafs, static, or both"
                )))
            }
        });
    }
    if let Some(seed) = args.seed {
        cfg.run.seed = seed;
    }
    if let Some(reps) = args.reps {
        cfg.run.reps = Some(reps);
    }
    cfg.validate()?;

    let out_dir = args
        .out
        .unwrap_or_else(|| PathBuf::from(cfg.out_dir()));
    let opts = RunnerOptions {
        out_dir: out_dir.clone(),
        quiet: false,
    };
    let outcomes = execute(&cfg, &opts)?;
    let runs: usize = outcomes.iter().map(|o| o.runs.len()).sum();
    println!(
        "wrote {} runs under {} (aggregate: {})",
        runs,
        out_dir.display(),
        out_dir.join("aggregate.csv").display()
    );
    Ok(())
}
