//! Per-BS and set-based metrics, and aggregation across seeds.
//!
//! A cell's mean throughput averages over its attached UEs (0 when it has
//! none). Set throughput and power average over the member cells, so every
//! cell weighs the same regardless of load. Spectral efficiency is
//! `T_S / B` and energy efficiency is `T_S · τ / (PC_S · τ)`, i.e. megabits
//! delivered per joule consumed; τ cancels.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::records::{CellRow, UeRow};
use crate::scenario::{PowerLevel, Scenario};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricsError {
    #[error("set '{0}' has no members")]
    EmptySet(String),
    #[error("no value for cell {0}")]
    MissingCell(u32),
    #[error("no intervals recorded")]
    NoIntervals,
    #[error("missing groups: {}", .0.join(", "))]
    MissingGroups(Vec<String>),
    #[error("malformed interval: {0}")]
    Malformed(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SetKind {
    KV,
    KS,
    Union,
}

impl SetKind {
    pub fn label(&self) -> &'static str {
        match self {
            SetKind::KV => "k_v",
            SetKind::KS => "k_s",
            SetKind::Union => "union",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SetDefinition {
    pub name: String,
    pub members: Vec<u32>,
    pub kind: SetKind,
}

/// K^v, K^s and their union for a scenario over `n_bs` cells.
pub fn scenario_sets(scenario: &Scenario, n_bs: u32) -> [SetDefinition; 3] {
    let kv: Vec<u32> = (0..n_bs).filter(|c| scenario.is_variable(*c)).collect();
    let ks: Vec<u32> = (0..n_bs).filter(|c| !scenario.is_variable(*c)).collect();
    [
        SetDefinition { name: "k_v".into(), members: kv, kind: SetKind::KV },
        SetDefinition { name: "k_s".into(), members: ks, kind: SetKind::KS },
        SetDefinition { name: "union".into(), members: (0..n_bs).collect(), kind: SetKind::Union },
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SetMetrics {
    pub t_set_mbps: f64,
    pub pc_set_kw: f64,
    /// Mb/s/MHz, numerically equal to b/s/Hz.
    pub se_set: f64,
    /// Mb/J.
    pub ee_set: f64,
}

impl SetMetrics {
    pub fn new(t_set_mbps: f64, pc_set_kw: f64, bandwidth_hz: f64) -> Self {
        Self {
            t_set_mbps,
            pc_set_kw,
            se_set: set_se(t_set_mbps, bandwidth_hz),
            ee_set: set_ee(t_set_mbps, pc_set_kw),
        }
    }
}

/// Mean throughput over the UEs attached to `cell_id` in one time slice.
pub fn mean_bs_throughput(cell_id: u32, ue_rows: &[UeRow]) -> f64 {
    let (sum, n) = ue_rows
        .iter()
        .filter(|r| r.serving_cell == Some(cell_id))
        .fold((0.0, 0u32), |(s, n), r| (s + r.throughput_mbps, n + 1));
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}

fn set_mean(set: &SetDefinition, per_cell: &[f64]) -> Result<f64, MetricsError> {
    if set.members.is_empty() {
        return Err(MetricsError::EmptySet(set.name.clone()));
    }
    let mut sum = 0.0;
    for &c in &set.members {
        sum += per_cell.get(c as usize).ok_or(MetricsError::MissingCell(c))?;
    }
    Ok(sum / set.members.len() as f64)
}

/// How a set's throughput mean treats member cells with no attached UEs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EmptyCellRule {
    /// Empty cells contribute 0 Mb/s and count in the denominator.
    Zero,
    /// Empty cells are left out; a set with no loaded member has T_S = 0.
    #[default]
    Exclude,
}

/// Set throughput over the members that carry UEs, or all members under
/// [`EmptyCellRule::Zero`].
pub fn set_throughput_loaded(
    set: &SetDefinition,
    per_cell_mbps: &[f64],
    attached: &[u32],
    rule: EmptyCellRule,
) -> Result<f64, MetricsError> {
    if rule == EmptyCellRule::Zero {
        return set_throughput(set, per_cell_mbps);
    }
    if set.members.is_empty() {
        return Err(MetricsError::EmptySet(set.name.clone()));
    }
    let (mut sum, mut n) = (0.0, 0u32);
    for &c in &set.members {
        let tp = per_cell_mbps.get(c as usize).ok_or(MetricsError::MissingCell(c))?;
        let load = attached.get(c as usize).ok_or(MetricsError::MissingCell(c))?;
        if *load > 0 {
            sum += tp;
            n += 1;
        }
    }
    Ok(if n == 0 { 0.0 } else { sum / n as f64 })
}

/// Mean of the member cells' mean throughputs (Mb/s). `per_cell_mbps` is
/// indexed by cell id.
pub fn set_throughput(set: &SetDefinition, per_cell_mbps: &[f64]) -> Result<f64, MetricsError> {
    set_mean(set, per_cell_mbps)
}

/// Mean member consumption, in kW.
pub fn set_power(set: &SetDefinition, per_cell_w: &[f64]) -> Result<f64, MetricsError> {
    Ok(set_mean(set, per_cell_w)? / 1e3)
}

pub fn set_se(t_set_mbps: f64, bandwidth_hz: f64) -> f64 {
    t_set_mbps / (bandwidth_hz / 1e6)
}

/// Mb/s over kW, expressed in Mb/J.
pub fn set_ee(t_set_mbps: f64, pc_set_kw: f64) -> f64 {
    t_set_mbps / (pc_set_kw * 1e3)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunMetrics {
    pub k_v: Option<SetMetrics>,
    pub k_s: Option<SetMetrics>,
    pub union: SetMetrics,
}

impl RunMetrics {
    pub fn get(&self, kind: SetKind) -> Option<&SetMetrics> {
        match kind {
            SetKind::KV => self.k_v.as_ref(),
            SetKind::KS => self.k_s.as_ref(),
            SetKind::Union => Some(&self.union),
        }
    }
}

/// Folds per-interval cell rows into run-level set metrics: T_S and PC_S are
/// averaged over intervals, SE and EE derived from those averages.
#[derive(Debug, Clone)]
pub struct RunMetricsAccumulator {
    sets: [SetDefinition; 3],
    bandwidth_hz: f64,
    rule: EmptyCellRule,
    attached: Vec<u32>,
    sum_t: [f64; 3],
    sum_pc: [f64; 3],
    intervals: u64,
    tp: Vec<f64>,
    pc: Vec<f64>,
}

impl RunMetricsAccumulator {
    pub fn new(scenario: &Scenario, n_bs: u32, bandwidth_hz: f64, rule: EmptyCellRule) -> Self {
        Self {
            sets: scenario_sets(scenario, n_bs),
            bandwidth_hz,
            rule,
            attached: vec![0; n_bs as usize],
            sum_t: [0.0; 3],
            sum_pc: [0.0; 3],
            intervals: 0,
            tp: vec![0.0; n_bs as usize],
            pc: vec![0.0; n_bs as usize],
        }
    }

    /// One interval's rows, one per cell.
    pub fn push_interval(&mut self, rows: &[CellRow]) -> Result<(), MetricsError> {
        if rows.len() != self.tp.len() {
            return Err(MetricsError::Malformed(format!(
                "{} cell rows for {} cells",
                rows.len(),
                self.tp.len()
            )));
        }
        for r in rows {
            let i = r.cell_id as usize;
            if i >= self.tp.len() {
                return Err(MetricsError::MissingCell(r.cell_id));
            }
            self.tp[i] = r.mean_tp_mbps;
            self.pc[i] = r.p_cons_w;
            self.attached[i] = r.n_attached;
        }
        for (k, set) in self.sets.iter().enumerate() {
            if set.members.is_empty() {
                continue;
            }
            self.sum_t[k] += set_throughput_loaded(set, &self.tp, &self.attached, self.rule)?;
            self.sum_pc[k] += set_power(set, &self.pc)?;
        }
        self.intervals += 1;
        Ok(())
    }

    pub fn finish(&self) -> Result<RunMetrics, MetricsError> {
        if self.intervals == 0 {
            return Err(MetricsError::NoIntervals);
        }
        let n = self.intervals as f64;
        let at = |k: usize| {
            (!self.sets[k].members.is_empty())
                .then(|| SetMetrics::new(self.sum_t[k] / n, self.sum_pc[k] / n, self.bandwidth_hz))
        };
        Ok(RunMetrics {
            k_v: at(0),
            k_s: at(1),
            union: at(2).expect("union is never empty"),
        })
    }
}

/// Replays a full cell log (rows grouped by interval, cells in id order).
pub fn metrics_from_cell_log(
    rows: &[CellRow],
    scenario: &Scenario,
    n_bs: u32,
    bandwidth_hz: f64,
    rule: EmptyCellRule,
) -> Result<RunMetrics, MetricsError> {
    let mut acc = RunMetricsAccumulator::new(scenario, n_bs, bandwidth_hz, rule);
    for chunk in rows.chunks(n_bs as usize) {
        let t = chunk[0].t_s;
        if chunk.iter().any(|r| r.t_s.to_bits() != t.to_bits()) {
            return Err(MetricsError::Malformed(format!("interval at t={t} is incomplete")));
        }
        acc.push_interval(chunk)?;
    }
    acc.finish()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stat {
    pub mean: f64,
    pub std: f64,
}

/// Mean and sample standard deviation; std is 0 for a single sample.
pub fn mean_std(xs: &[f64]) -> Stat {
    let n = xs.len();
    if n == 0 {
        return Stat { mean: f64::NAN, std: f64::NAN };
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    let std = if n < 2 {
        0.0
    } else {
        (xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64).sqrt()
    };
    Stat { mean, std }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SetAggregate {
    pub t_set_mbps: f64,
    pub t_set_mbps_std: f64,
    pub pc_set_kw: f64,
    pub pc_set_kw_std: f64,
    pub se_set: f64,
    pub se_set_std: f64,
    pub ee_set: f64,
    pub ee_set_std: f64,
    pub n_seeds: usize,
}

impl SetAggregate {
    fn from_samples(samples: &[SetMetrics]) -> Self {
        let col = |f: fn(&SetMetrics) -> f64| mean_std(&samples.iter().map(f).collect::<Vec<_>>());
        let t = col(|m| m.t_set_mbps);
        let pc = col(|m| m.pc_set_kw);
        let se = col(|m| m.se_set);
        let ee = col(|m| m.ee_set);
        Self {
            t_set_mbps: t.mean,
            t_set_mbps_std: t.std,
            pc_set_kw: pc.mean,
            pc_set_kw_std: pc.std,
            se_set: se.mean,
            se_set_std: se.std,
            ee_set: ee.mean,
            ee_set_std: ee.std,
            n_seeds: samples.len(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupKey {
    pub scenario: String,
    pub power_level: PowerLevel,
}

impl GroupKey {
    pub fn new(scenario: &str, power_level: PowerLevel) -> Self {
        Self { scenario: scenario.to_string(), power_level }
    }

    pub fn label(&self) -> String {
        format!("{}@{}", self.scenario, self.power_level)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedAggregate {
    pub scenario: String,
    pub power_level: PowerLevel,
    pub n_seeds: usize,
    pub k_v: Option<SetAggregate>,
    pub k_s: Option<SetAggregate>,
    pub union: SetAggregate,
}

/// Aggregates runs per (scenario, power level) in the order of `expected`.
/// Groups in `expected` with no runs are reported as an error.
pub fn aggregate_seeds(
    runs: &[(GroupKey, RunMetrics)],
    expected: &[GroupKey],
) -> Result<Vec<SeedAggregate>, MetricsError> {
    let missing: Vec<String> = expected
        .iter()
        .filter(|k| !runs.iter().any(|(g, _)| g == *k))
        .map(GroupKey::label)
        .collect();
    if !missing.is_empty() {
        return Err(MetricsError::MissingGroups(missing));
    }
    Ok(expected
        .iter()
        .map(|key| {
            let group: Vec<&RunMetrics> = runs.iter().filter(|(g, _)| g == key).map(|(_, m)| m).collect();
            let collect = |kind: SetKind| -> Option<SetAggregate> {
                let samples: Vec<SetMetrics> = group.iter().filter_map(|m| m.get(kind).copied()).collect();
                (!samples.is_empty()).then(|| SetAggregate::from_samples(&samples))
            };
            SeedAggregate {
                scenario: key.scenario.clone(),
                power_level: key.power_level,
                n_seeds: group.len(),
                k_v: collect(SetKind::KV),
                k_s: collect(SetKind::KS),
                union: collect(SetKind::Union).expect("non-empty group"),
            }
        })
        .collect())
}
