//! `run`, `topology` and single-run `replay`.

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::Path;

use hexwatt::engine::RunRecord;
use hexwatt::metrics::metrics_from_cell_log;
use hexwatt::records::{read_cell_log, CsvSink};
use hexwatt::topology::{place_ues, place_ues_exact, write_ues_csv};
use hexwatt::{RunConfig, Scenario};
use serde::{Deserialize, Serialize};

use crate::args::{RunArgs, TopologyArgs};
use crate::common::*;
use crate::error::{CliError, Result};

pub const UE_LOG: &str = "ue_log.csv";
pub const CELL_LOG: &str = "cell_log.csv";
pub const RUN_SUMMARY: &str = "run_summary.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub config_sha256: String,
    pub config: RunConfig,
    pub scenario: Scenario,
    pub record: RunRecord,
}

/// Runs the engine and streams both logs into `dir`.
pub fn run_to_dir(
    ctx: &hexwatt::SimContext,
    scenario: &Scenario,
    level: hexwatt::PowerLevel,
    seed: u64,
    dir: &Path,
) -> Result<RunRecord> {
    fs::create_dir_all(dir)?;
    let ue = BufWriter::new(File::create(dir.join(UE_LOG))?);
    let cell = BufWriter::new(File::create(dir.join(CELL_LOG))?);
    let mut sink = CsvSink::new(ue, cell);
    let record = hexwatt::run(ctx, scenario, level, seed, None, &mut sink)?;
    sink.finish()?;
    Ok(record)
}

pub fn cmd_run(args: &RunArgs) -> Result<()> {
    let ctx = load_context(&args.config)?;
    let scenario = parse_scenario(&args.scenario, ctx.n_bs())?;
    let level = power_level(&args.power)?;
    check_level(level, &ctx)?;
    let out = output_dir(args.out.as_ref(), &ctx)?;

    let record = run_to_dir(&ctx, &scenario, level, args.seed, &out)?;
    let u = record.metrics.union;
    println!(
        "{} @ {} seed {}: {} UEs, T {:.4} Mb/s, PC {:.6} kW, EE {:.6} Mb/J, SE {:.6}",
        scenario.name, level, args.seed, record.n_ue, u.t_set_mbps, u.pc_set_kw, u.ee_set, u.se_set
    );
    let summary = RunSummary {
        config_sha256: config_digest(&ctx.config),
        config: ctx.config.clone(),
        scenario,
        record,
    };
    write_json(&out.join(RUN_SUMMARY), &summary)
}

pub fn cmd_topology(args: &TopologyArgs) -> Result<()> {
    let ctx = load_context(&args.config)?;
    let ues = match args.seed {
        None => None,
        Some(seed) => {
            let net = &ctx.config.network;
            Some(match ctx.config.run.fixed_ue_count {
                Some(n) => place_ues_exact(&ctx.region, n, net.ue_height_m, seed),
                None => place_ues(&ctx.region, net.ue_density_per_km2, net.ue_height_m, seed),
            }
            .map_err(|e| CliError::Runtime(e.to_string()))?)
        }
    };
    fs::create_dir_all(&args.out)?;
    ctx.plan.write_csv(BufWriter::new(File::create(args.out.join("sites.csv"))?))?;
    let mut w = csv::Writer::from_writer(BufWriter::new(File::create(args.out.join("region.csv"))?));
    w.write_record(["vertex", "x_m", "y_m"])?;
    for (k, (x, y)) in ctx.region.vertices.iter().enumerate() {
        w.write_record([k.to_string(), x.to_string(), y.to_string()])?;
    }
    w.flush()?;
    if let Some(ues) = &ues {
        write_ues_csv(ues, BufWriter::new(File::create(args.out.join("ues.csv"))?))?;
    }
    println!(
        "{} sites, region {:.6} km^2{}",
        ctx.plan.len(),
        ctx.region.area_km2,
        ues.map(|u| format!(", {} UEs", u.len())).unwrap_or_default()
    );
    Ok(())
}

/// Recomputes a single run's metrics from its cell log.
pub fn replay_run(dir: &Path) -> Result<bool> {
    let summary: RunSummary = read_json(&dir.join(RUN_SUMMARY))?;
    let path = dir.join(CELL_LOG);
    let file = File::open(&path).map_err(|_| CliError::MissingFile(path.display().to_string()))?;
    let rows = read_cell_log(file)?;
    let cfg = &summary.config;
    let replayed = metrics_from_cell_log(
        &rows,
        &summary.scenario,
        cfg.network.n_bs,
        cfg.network.bandwidth_hz,
        cfg.run.empty_cell_mean,
    )?;
    let ok = replayed == summary.record.metrics;
    println!("{}: {}", dir.display(), if ok { "match" } else { "MISMATCH" });
    if !ok {
        println!("  stored   {:?}\n  replayed {:?}", summary.record.metrics, replayed);
    }
    Ok(ok)
}
