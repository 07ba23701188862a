//! Scenario × power-level × seed sweeps, their summaries and replay.
//!
//! Each finished run leaves a record file under `runs/`; a re-invoked sweep
//! skips any run whose record exists and was produced by the same config.

use std::fs::{self, File};
use std::path::{Path, PathBuf};

use hexwatt::engine::RunRecord;
use hexwatt::metrics::{aggregate_seeds, metrics_from_cell_log, GroupKey, RunMetrics, SeedAggregate, SetAggregate};
use hexwatt::records::{read_cell_log, NullSink};
use hexwatt::scenario::{default_power_grid, parse_seeds, PowerLevel};
use hexwatt::{RunConfig, Scenario, SimContext};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::args::{AggregateArgs, SweepArgs};
use crate::common::*;
use crate::error::{CliError, Result};
use crate::run::{run_to_dir, CELL_LOG};

pub const PLAN_FILE: &str = "sweep.json";
pub const SUMMARY_JSON: &str = "summary.json";
pub const SUMMARY_CSV: &str = "summary.csv";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPlan {
    pub config_sha256: String,
    pub config: RunConfig,
    pub scenarios: Vec<Scenario>,
    pub levels: Vec<PowerLevel>,
    pub seeds: Vec<u64>,
    pub keep_logs: bool,
}

impl SweepPlan {
    pub fn n_runs(&self) -> usize {
        self.scenarios.len() * self.levels.len() * self.seeds.len()
    }

    /// Every (scenario, level, seed) in summary order.
    pub fn tasks(&self) -> Vec<Task> {
        let mut out = Vec::with_capacity(self.n_runs());
        for (si, _) in self.scenarios.iter().enumerate() {
            for &level in &self.levels {
                for &seed in &self.seeds {
                    out.push(Task { scenario: si, level, seed });
                }
            }
        }
        out
    }

    pub fn groups(&self) -> Vec<GroupKey> {
        self.scenarios
            .iter()
            .flat_map(|s| self.levels.iter().map(move |&l| GroupKey::new(&s.name, l)))
            .collect()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Task {
    pub scenario: usize,
    pub level: PowerLevel,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunFile {
    pub config_sha256: String,
    pub record: RunRecord,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub config_sha256: String,
    pub n_bs: u32,
    pub bandwidth_hz: f64,
    pub seeds: Vec<u64>,
    pub groups: Vec<SeedAggregate>,
}

fn run_dir(root: &Path, scenario: &str, level: PowerLevel) -> PathBuf {
    root.join("runs").join(scenario).join(level.label())
}

fn record_path(root: &Path, scenario: &str, t: &Task) -> PathBuf {
    run_dir(root, scenario, t.level).join(format!("seed-{}.json", t.seed))
}

fn log_dir(root: &Path, scenario: &str, t: &Task) -> PathBuf {
    run_dir(root, scenario, t.level).join(format!("seed-{}", t.seed))
}

fn load_record(path: &Path, digest: &str) -> Option<RunRecord> {
    let text = fs::read_to_string(path).ok()?;
    let file: RunFile = serde_json::from_str(&text).ok()?;
    (file.config_sha256 == digest).then_some(file.record)
}

/// Validates every input and returns the plan without touching the disk.
pub fn plan_sweep(args: &SweepArgs, ctx: &SimContext) -> Result<SweepPlan> {
    let scenarios = if args.scenarios.is_empty() {
        Scenario::builtins()
    } else {
        args.scenarios.iter().map(|s| parse_scenario(s, ctx.n_bs())).collect::<Result<_>>()?
    };
    let levels = if args.levels.is_empty() {
        default_power_grid()
    } else {
        args.levels
            .iter()
            .map(|l| l.parse::<PowerLevel>().map_err(|e| CliError::Usage(e.to_string())))
            .collect::<Result<_>>()?
    };
    for &l in &levels {
        check_level(l, ctx)?;
    }
    let seeds = match args.seed {
        Some(s) => vec![s],
        None => parse_seeds(&args.seeds).map_err(|e| CliError::Usage(e.to_string()))?,
    };
    if args.jobs == Some(0) {
        return Err(CliError::Usage("--jobs must be >= 1".into()));
    }
    Ok(SweepPlan {
        config_sha256: config_digest(&ctx.config),
        config: ctx.config.clone(),
        scenarios,
        levels,
        seeds,
        keep_logs: args.keep_logs,
    })
}

fn execute(ctx: &SimContext, plan: &SweepPlan, root: &Path, t: &Task) -> Result<RunRecord> {
    let scenario = &plan.scenarios[t.scenario];
    let record = if plan.keep_logs {
        run_to_dir(ctx, scenario, t.level, t.seed, &log_dir(root, &scenario.name, t))?
    } else {
        hexwatt::run(ctx, scenario, t.level, t.seed, None, &mut NullSink)?
    };
    let path = record_path(root, &scenario.name, t);
    fs::create_dir_all(path.parent().unwrap())?;
    write_json(&path, &RunFile { config_sha256: plan.config_sha256.clone(), record: record.clone() })?;
    Ok(record)
}

pub fn cmd_sweep(args: &SweepArgs) -> Result<()> {
    let ctx = load_context(&args.config)?;
    let plan = plan_sweep(args, &ctx)?;
    let root = output_dir(args.out.as_ref(), &ctx)?;
    fs::create_dir_all(&root)?;
    write_json(&root.join(PLAN_FILE), &plan)?;

    let tasks = plan.tasks();
    let pending: Vec<&Task> = tasks
        .iter()
        .filter(|t| {
            let name = &plan.scenarios[t.scenario].name;
            let done = load_record(&record_path(&root, name, t), &plan.config_sha256).is_some();
            let logs_ok = !plan.keep_logs || log_dir(&root, name, t).join(CELL_LOG).exists();
            !(done && logs_ok)
        })
        .collect();
    let reused = tasks.len() - pending.len();
    log::info!("{} runs planned, {} already complete", tasks.len(), reused);

    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(j) = args.jobs {
        builder = builder.num_threads(j);
    }
    let pool = builder.build().map_err(|e| CliError::Runtime(e.to_string()))?;
    let results: Vec<Result<RunRecord>> =
        pool.install(|| pending.par_iter().map(|t| execute(&ctx, &plan, &root, t)).collect());
    let failed = results.iter().filter(|r| r.is_err()).count();
    for (t, r) in pending.iter().zip(&results) {
        if let Err(e) = r {
            log::error!("{} @ {} seed {}: {e}", plan.scenarios[t.scenario].name, t.level, t.seed);
        }
    }

    let summary = summarise(&plan, &root)?;
    write_summary(&root, &summary)?;
    println!(
        "sweep: {} runs ({} reused, {} failed), {} groups -> {}",
        tasks.len(),
        reused,
        failed,
        summary.groups.len(),
        root.join(SUMMARY_JSON).display()
    );
    Ok(())
}

/// Collects stored records for every planned run and aggregates them.
pub fn summarise(plan: &SweepPlan, root: &Path) -> Result<Summary> {
    let mut runs = Vec::with_capacity(plan.n_runs());
    let mut missing = 0;
    for t in plan.tasks() {
        let name = &plan.scenarios[t.scenario].name;
        match load_record(&record_path(root, name, &t), &plan.config_sha256) {
            Some(r) => runs.push((GroupKey::new(name, t.level), r.metrics)),
            None => missing += 1,
        }
    }
    if missing > 0 {
        return Err(CliError::Incomplete { missing, total: plan.n_runs() });
    }
    build_summary(plan, &runs)
}

fn build_summary(plan: &SweepPlan, runs: &[(GroupKey, RunMetrics)]) -> Result<Summary> {
    Ok(Summary {
        config_sha256: plan.config_sha256.clone(),
        n_bs: plan.config.network.n_bs,
        bandwidth_hz: plan.config.network.bandwidth_hz,
        seeds: plan.seeds.clone(),
        groups: aggregate_seeds(runs, &plan.groups())?,
    })
}

#[derive(Debug, Serialize)]
struct SummaryRow<'a> {
    scenario: &'a str,
    power_level: String,
    set: &'a str,
    n_seeds: usize,
    t_set_mbps: f64,
    t_set_mbps_std: f64,
    pc_set_kw: f64,
    pc_set_kw_std: f64,
    se_set: f64,
    se_set_std: f64,
    ee_set: f64,
    ee_set_std: f64,
}

pub fn write_summary(root: &Path, summary: &Summary) -> Result<()> {
    write_json(&root.join(SUMMARY_JSON), summary)?;
    let mut w = csv::Writer::from_path(root.join(SUMMARY_CSV))?;
    for g in &summary.groups {
        let sets: [(&str, Option<&SetAggregate>); 3] =
            [("k_v", g.k_v.as_ref()), ("k_s", g.k_s.as_ref()), ("union", Some(&g.union))];
        for (name, set) in sets {
            let Some(s) = set else { continue };
            w.serialize(SummaryRow {
                scenario: &g.scenario,
                power_level: g.power_level.label(),
                set: name,
                n_seeds: s.n_seeds,
                t_set_mbps: s.t_set_mbps,
                t_set_mbps_std: s.t_set_mbps_std,
                pc_set_kw: s.pc_set_kw,
                pc_set_kw_std: s.pc_set_kw_std,
                se_set: s.se_set,
                se_set_std: s.se_set_std,
                ee_set: s.ee_set,
                ee_set_std: s.ee_set_std,
            })?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn cmd_aggregate(args: &AggregateArgs) -> Result<()> {
    let plan: SweepPlan = read_json(&args.dir.join(PLAN_FILE))?;
    let summary = summarise(&plan, &args.dir)?;
    write_summary(&args.dir, &summary)?;
    println!("{} groups -> {}", summary.groups.len(), args.dir.join(SUMMARY_JSON).display());
    Ok(())
}

/// Recomputes every run from its cell log and the summary from those runs.
pub fn replay_sweep(root: &Path) -> Result<bool> {
    let plan: SweepPlan = read_json(&root.join(PLAN_FILE))?;
    let stored: Summary = read_json(&root.join(SUMMARY_JSON))?;
    let cfg = &plan.config;
    let mut runs = Vec::with_capacity(plan.n_runs());
    let mut mismatched = 0;
    for t in plan.tasks() {
        let scenario = &plan.scenarios[t.scenario];
        let path = log_dir(root, &scenario.name, &t).join(CELL_LOG);
        let file = File::open(&path)
            .map_err(|_| CliError::MissingFile(format!("{} (sweep needs --keep-logs)", path.display())))?;
        let metrics = metrics_from_cell_log(
            &read_cell_log(file)?,
            scenario,
            cfg.network.n_bs,
            cfg.network.bandwidth_hz,
            cfg.run.empty_cell_mean,
        )?;
        let record = load_record(&record_path(root, &scenario.name, &t), &plan.config_sha256);
        if record.map(|r| r.metrics) != Some(metrics) {
            mismatched += 1;
            println!("MISMATCH {} @ {} seed {}", scenario.name, t.level, t.seed);
        }
        runs.push((GroupKey::new(&scenario.name, t.level), metrics));
    }
    let replayed = build_summary(&plan, &runs)?;
    let summary_ok = replayed == stored;
    println!(
        "{} runs replayed, {} mismatched; summary {}",
        runs.len(),
        mismatched,
        if summary_ok { "matches" } else { "MISMATCH" }
    );
    Ok(mismatched == 0 && summary_ok)
}
