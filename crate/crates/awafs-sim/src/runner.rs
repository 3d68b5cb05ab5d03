//! Scenario execution: expands a config into (sub-scenario × scheduler × rep)
//! jobs, runs them in parallel, and writes the output tree.
//!
//! Layout under the output directory:
//!
//! ```text
//! <out>/<scenario>/<scheduler>/run-<seed>/flows.csv
//!                                         summary.csv
//!                                         thresholds.csv
//!                                         manifest.toml
//! <out>/aggregate.csv
//! ```
//!
//! Overhead scenarios expand into one sub-scenario per observation-window
//! value (`overhead-w0.25s`, ...). Repetition `i` uses seed `base + i`, and the
//! same seed drives both scheduler arms so comparisons are paired.

use crate::config::{ConfigError, ScenarioConfig, ScenarioKind};
use crate::engine::SimTime;
use crate::metrics::{ci95_half_width, summarize, FlowClass};
use crate::sim::{BuildError, RunOutput, SchedulerMode, SimConfig, Simulation};
use crate::workload::{generate, PlanError};
use rayon::prelude::*;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

#[derive(Debug, thiserror::Error)]
pub enum RunnerError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Build(#[from] BuildError),
    #[error(transparent)]
    Plan(#[from] PlanError),
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> RunnerError + '_ {
    move |source| RunnerError::Io {
        path: path.display().to_string(),
        source,
    }
}

pub struct RunnerOptions {
    pub out_dir: PathBuf,
    /// Suppress the console summary table.
    pub quiet: bool,
}

/// One completed repetition.
pub struct RunSummary {
    pub seed: u64,
    pub rep: u32,
    pub dir: PathBuf,
    pub output: RunOutput,
}

impl RunSummary {
    /// Mean completed-flow-window occupancy across ports and sample times.
    pub fn mean_window_entries(&self) -> f64 {
        let s = &self.output.window_samples;
        if s.is_empty() {
            return 0.0;
        }
        s.iter().map(|w| w.entries as f64).sum::<f64>() / s.len() as f64
    }
}

/// All repetitions of one (sub-scenario, scheduler) cell.
pub struct ScenarioOutcome {
    pub label: String,
    pub scheduler: String,
    /// Effective observation window (sweep value for overhead sub-scenarios).
    pub w_update: SimTime,
    pub runs: Vec<RunSummary>,
}

impl ScenarioOutcome {
    /// Per-run mean FCTs (seconds) for a class, one entry per repetition.
    pub fn per_run_mean_fct(&self, class: Option<FlowClass>) -> Vec<f64> {
        self.runs
            .iter()
            .filter_map(|r| summarize(&r.output.ledger.fcts_secs(class)).map(|s| s.mean))
            .collect()
    }

    pub fn total_timeouts(&self) -> u64 {
        self.runs.iter().map(|r| r.output.total_timeouts).sum()
    }
}

struct Job {
    sub_label: String,
    scheduler: &'static str,
    mode: SchedulerMode,
    seed: u64,
    rep: u32,
}

/// Runs every job in a scenario config and writes the output tree. Outcomes
/// are ordered sub-scenario-major, then scheduler, matching the config.
pub fn execute(
    cfg: &ScenarioConfig,
    opts: &RunnerOptions,
) -> Result<Vec<ScenarioOutcome>, RunnerError> {
    cfg.validate()?;
    let adapt = cfg.adapt_params()?;
    let subs: Vec<(String, SimTime)> = match cfg.scenario.kind {
        ScenarioKind::Overhead => cfg
            .adapt
            .w_update_sweep_s
            .as_ref()
            .expect("validated")
            .iter()
            .map(|&w| {
                (
                    format!("{}-w{}s", cfg.scenario.label, w),
                    SimTime::from_secs_f64(w),
                )
            })
            .collect(),
        _ => vec![(cfg.scenario.label.clone(), adapt.w_update)],
    };

    let mut jobs = Vec::new();
    for (sub_label, w_update) in &subs {
        for scheduler in cfg.scheduler().arms() {
            let mode = match scheduler {
                "awafs" => {
                    let mut params = adapt.clone();
                    params.w_update = *w_update;
                    SchedulerMode::Awafs { params }
                }
                _ => SchedulerMode::Static {
                    thresholds: cfg.static_thresholds()?,
                },
            };
            for rep in 0..cfg.reps() {
                jobs.push(Job {
                    sub_label: sub_label.clone(),
                    scheduler,
                    mode: mode.clone(),
                    seed: cfg.run.seed + rep as u64,
                    rep,
                });
            }
        }
    }

    let summaries: Vec<RunSummary> = jobs
        .into_par_iter()
        .map(|job| run_one(cfg, job, &opts.out_dir))
        .collect::<Result<_, _>>()?;

    // Regroup in deterministic (sub, scheduler) order.
    let mut outcomes: Vec<ScenarioOutcome> = Vec::new();
    let mut iter = summaries.into_iter();
    for (sub_label, w_update) in &subs {
        for scheduler in cfg.scheduler().arms() {
            let runs: Vec<RunSummary> = (0..cfg.reps())
                .map(|_| iter.next().expect("one summary per job"))
                .collect();
            debug_assert!(runs
                .iter()
                .all(|r| r.dir.starts_with(opts.out_dir.join(sub_label).join(scheduler))));
            outcomes.push(ScenarioOutcome {
                label: sub_label.clone(),
                scheduler: scheduler.to_string(),
                w_update: *w_update,
                runs,
            });
        }
    }

    let aggregate = aggregate_csv(cfg, &outcomes);
    let agg_path = opts.out_dir.join("aggregate.csv");
    std::fs::create_dir_all(&opts.out_dir).map_err(io_err(&opts.out_dir))?;
    std::fs::write(&agg_path, aggregate).map_err(io_err(&agg_path))?;

    if !opts.quiet {
        print!("{}", console_table(cfg, &outcomes));
    }
    Ok(outcomes)
}

fn run_one(cfg: &ScenarioConfig, job: Job, out_root: &Path) -> Result<RunSummary, RunnerError> {
    let plan = cfg.traffic_plan(job.seed)?;
    let specs = generate(&plan)?;
    // Safety valve: a run that has not drained two minutes after the last
    // arrival is pathological; cut it rather than spin.
    let hard_stop = specs
        .last()
        .map(|f| f.start + SimTime::from_secs(120))
        .unwrap_or(SimTime::from_secs(120));
    let record_thresholds = matches!(job.mode, SchedulerMode::Awafs { .. });
    let sim_cfg = SimConfig {
        topology: cfg.topology_config()?,
        transport: cfg.dctcp_params(),
        mode: job.mode.clone(),
        stats_period: cfg.stats_period(),
        record_thresholds,
        hard_stop: Some(hard_stop),
        seed: job.seed,
    };
    let sim = Simulation::new(sim_cfg, &specs)?;
    let mut output = sim.run();

    // Flows that started during warmup are excluded from all statistics.
    let warmup = cfg.warmup();
    output.ledger.flows.retain(|f| f.start >= warmup);

    let dir = out_root
        .join(&job.sub_label)
        .join(job.scheduler)
        .join(format!("run-{}", job.seed));
    std::fs::create_dir_all(&dir).map_err(io_err(&dir))?;
    let write = |name: &str, body: String| -> Result<(), RunnerError> {
        let path = dir.join(name);
        std::fs::write(&path, body).map_err(io_err(&path))
    };
    write("flows.csv", output.ledger.flows_csv())?;
    write(
        "summary.csv",
        output
            .ledger
            .summary_csv(&job.sub_label, cfg.traffic.load, job.scheduler),
    )?;
    write("thresholds.csv", output.ledger.thresholds_csv())?;
    write("manifest.toml", manifest(cfg, &job, &output))?;

    Ok(RunSummary {
        seed: job.seed,
        rep: job.rep,
        dir,
        output,
    })
}

fn manifest(cfg: &ScenarioConfig, job: &Job, out: &RunOutput) -> String {
    let mut m = String::new();
    let _ = writeln!(m, "scenario = {:?}", job.sub_label);
    let _ = writeln!(m, "scheduler = {:?}", job.scheduler);
    let _ = writeln!(m, "seed = {}", job.seed);
    let _ = writeln!(m, "rep = {}", job.rep);
    let _ = writeln!(m, "load = {}", cfg.traffic.load);
    let _ = writeln!(m, "queues = {}", cfg.topology.queues);
    let _ = writeln!(m, "generated = {}", out.generated);
    let _ = writeln!(m, "completed = {}", out.completed);
    let _ = writeln!(m, "timeouts = {}", out.total_timeouts);
    let _ = writeln!(m, "end_time_s = \"{}\"", out.end_time);
    let _ = writeln!(m, "warmup_s = \"{}\"", cfg.warmup());
    match &job.mode {
        SchedulerMode::Awafs { params } => {
            let _ = writeln!(m, "w_update_s = \"{}\"", params.w_update);
            let _ = writeln!(m, "t_schedule_s = \"{}\"", params.t_schedule);
            let mean_entries = if out.window_samples.is_empty() {
                0.0
            } else {
                out.window_samples.iter().map(|w| w.entries as f64).sum::<f64>()
                    / out.window_samples.len() as f64
            };
            let _ = writeln!(m, "mean_window_entries = {mean_entries:.3}");
        }
        SchedulerMode::Static { thresholds } => {
            let _ = writeln!(m, "static_thresholds = {thresholds:?}");
        }
    }
    m
}

fn fmt_stat(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.9}")
    } else {
        "nan".to_string()
    }
}

/// Cross-repetition aggregate: mean and 95% CI half-width of each per-run
/// statistic.
fn aggregate_csv(cfg: &ScenarioConfig, outcomes: &[ScenarioOutcome]) -> String {
    let mut out = String::from("scenario,load,scheduler,class,metric,mean,ci95,reps\n");
    let classes: [(&str, Option<FlowClass>); 4] = [
        ("small", Some(FlowClass::Small)),
        ("medium", Some(FlowClass::Medium)),
        ("large", Some(FlowClass::Large)),
        ("all", None),
    ];
    for oc in outcomes {
        for (label, class) in classes {
            let mut rows: Vec<(&str, Vec<f64>)> = Vec::new();
            let mut means = Vec::new();
            let mut p99s = Vec::new();
            let mut counts = Vec::new();
            let mut timeouts = Vec::new();
            for r in &oc.runs {
                let fcts = r.output.ledger.fcts_secs(class);
                if let Some(s) = summarize(&fcts) {
                    means.push(s.mean);
                    p99s.push(s.p99);
                }
                counts.push(fcts.len() as f64);
                timeouts.push(r.output.ledger.total_timeouts(class) as f64);
            }
            rows.push(("mean_fct", means));
            rows.push(("p99_fct", p99s));
            rows.push(("count", counts));
            rows.push(("timeouts", timeouts));
            for (metric, values) in rows {
                let (mean, ci) = if values.is_empty() {
                    (f64::NAN, f64::NAN)
                } else {
                    (
                        values.iter().sum::<f64>() / values.len() as f64,
                        ci95_half_width(&values, false),
                    )
                };
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{},{}",
                    oc.label,
                    cfg.traffic.load,
                    oc.scheduler,
                    label,
                    metric,
                    fmt_stat(mean),
                    fmt_stat(ci),
                    values.len()
                );
            }
        }
    }
    out
}

fn console_table(cfg: &ScenarioConfig, outcomes: &[ScenarioOutcome]) -> String {
    let mut t = String::new();
    let _ = writeln!(
        t,
        "{:<24} {:<8} {:<7} {:>8} {:>14} {:>14} {:>9}",
        "scenario", "sched", "class", "flows", "mean_fct_s", "p99_fct_s", "timeouts"
    );
    for oc in outcomes {
        for (label, class) in [
            ("small", Some(FlowClass::Small)),
            ("medium", Some(FlowClass::Medium)),
            ("large", Some(FlowClass::Large)),
        ] {
            let count: usize = oc
                .runs
                .iter()
                .map(|r| r.output.ledger.fcts_secs(class).len())
                .sum();
            if count == 0 {
                continue;
            }
            let means = oc.per_run_mean_fct(class);
            let mean = means.iter().sum::<f64>() / means.len() as f64;
            let p99s: Vec<f64> = oc
                .runs
                .iter()
                .filter_map(|r| summarize(&r.output.ledger.fcts_secs(class)).map(|s| s.p99))
                .collect();
            let p99 = p99s.iter().sum::<f64>() / p99s.len() as f64;
            let timeouts: u64 = oc
                .runs
                .iter()
                .map(|r| r.output.ledger.total_timeouts(class))
                .sum();
            let _ = writeln!(
                t,
                "{:<24} {:<8} {:<7} {:>8} {:>14.6} {:>14.6} {:>9}",
                oc.label, oc.scheduler, label, count, mean, p99, timeouts
            );
        }
        if cfg.scenario.kind == ScenarioKind::Overhead {
            let mean_entries: Vec<f64> = oc.runs.iter().map(|r| r.mean_window_entries()).collect();
            let mean = mean_entries.iter().sum::<f64>() / mean_entries.len().max(1) as f64;
            let _ = writeln!(
                t,
                "{:<24} {:<8} window occupancy: {:.1} entries/port (mean)",
                oc.label, oc.scheduler, mean
            );
        }
    }
    t
}
