//! Interval-stepped simulation core.
//!
//! UEs are stationary, so the UE × cell link gains are computed once per run.
//! SINRs are recomputed only after a cell changes state; otherwise each
//! interval reuses the previous UE rows with a new timestamp.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::SimContext;
use crate::energy::EnergyError;
use crate::metrics::{MetricsError, RunMetrics, RunMetricsAccumulator};
use crate::radio::{Cqi, Mcs, RadioError};
use crate::records::{CellGroup, CellRow, LogSink, UeRow};
use crate::scenario::{PowerLevel, Scenario, ScenarioError};
use crate::topology::{place_ues, place_ues_exact, Point3, TopologyError};
use crate::units::{db_to_linear, linear_to_db, w_to_dbm};

#[derive(Debug, Error)]
pub enum EngineError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Topology(#[from] TopologyError),
    #[error(transparent)]
    Radio(#[from] RadioError),
    #[error(transparent)]
    Energy(#[from] EnergyError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellState {
    pub cell_id: u32,
    pub position: Point3,
    pub p_tx_w: f64,
    pub active: bool,
    pub group: CellGroup,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UeState {
    pub ue_id: u32,
    pub position: Point3,
    pub serving_cell: Option<u32>,
    pub sinr_db: f64,
    pub cqi: Cqi,
    pub mcs: Option<Mcs>,
    pub se_bps_hz: f64,
    pub throughput_bps: f64,
}

impl UeState {
    fn unattached(ue_id: u32, position: Point3) -> Self {
        Self {
            ue_id,
            position,
            serving_cell: None,
            sinr_db: f64::NEG_INFINITY,
            cqi: Cqi(0),
            mcs: None,
            se_bps_hz: 0.0,
            throughput_bps: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimClock {
    pub now_s: f64,
    pub interval_s: f64,
    pub until_s: f64,
    step: u64,
}

impl SimClock {
    pub fn new(interval_s: f64, until_s: f64) -> Self {
        assert!(interval_s > 0.0 && interval_s <= until_s, "need 0 < interval <= until");
        Self { now_s: 0.0, interval_s, until_s, step: 0 }
    }

    /// Number of intervals in `[0, until)`.
    pub fn total_steps(&self) -> u64 {
        (self.until_s / self.interval_s + 1e-9).floor() as u64
    }

    pub fn step_index(&self) -> u64 {
        self.step
    }

    pub fn finished(&self) -> bool {
        self.step >= self.total_steps()
    }

    fn advance(&mut self) {
        self.step += 1;
        self.now_s = self.step as f64 * self.interval_s;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "snake_case")]
pub enum Command {
    SetPower { cell_id: u32, p_tx_w: f64 },
    Sleep { cell_id: u32 },
    Wake { cell_id: u32, p_tx_w: f64 },
}

impl Command {
    pub fn cell_id(&self) -> u32 {
        match *self {
            Command::SetPower { cell_id, .. } | Command::Sleep { cell_id } | Command::Wake { cell_id, .. } => {
                cell_id
            }
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Command::SetPower { cell_id, p_tx_w } => write!(f, "set_power({cell_id}, {p_tx_w} W)"),
            Command::Sleep { cell_id } => write!(f, "sleep({cell_id})"),
            Command::Wake { cell_id, p_tx_w } => write!(f, "wake({cell_id}, {p_tx_w} W)"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RejectedCommand {
    pub t_s: f64,
    pub command: Command,
    pub reason: String,
}

/// Read-only state handed to a hook.
#[derive(Debug, Clone, Copy)]
pub struct SimView<'a> {
    pub t_s: f64,
    pub cells: &'a [CellState],
    pub ues: &'a [UeState],
    pub p_max_w: f64,
}

/// External controller, called once per interval before any metrics.
pub trait RicHook {
    fn on_interval(&mut self, view: &SimView<'_>) -> Vec<Command>;
}

impl<F: FnMut(&SimView<'_>) -> Vec<Command>> RicHook for F {
    fn on_interval(&mut self, view: &SimView<'_>) -> Vec<Command> {
        self(view)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HandoverEvent {
    pub t_s: f64,
    pub ue_id: u32,
    pub from: Option<u32>,
    pub to: Option<u32>,
}

/// Linear SINR of every (UE, cell) pair; 0 for inactive cells.
///
/// Interference for cell `j` is summed explicitly over active `k != j` in
/// id order.
fn sinr_matrix(cells: &[CellState], gains: &[f64], n_ue: usize, noise_w: f64) -> Vec<f64> {
    let n_bs = cells.len();
    let mut out = vec![0.0; n_ue * n_bs];
    let mut rx = vec![0.0; n_bs];
    for i in 0..n_ue {
        let g = &gains[i * n_bs..(i + 1) * n_bs];
        for j in 0..n_bs {
            rx[j] = if cells[j].active { cells[j].p_tx_w * g[j] } else { 0.0 };
        }
        for j in 0..n_bs {
            if !cells[j].active {
                continue;
            }
            let mut interference = 0.0;
            for k in 0..n_bs {
                if k != j && cells[k].active {
                    interference += rx[k];
                }
            }
            out[i * n_bs + j] = rx[j] / (interference + noise_w);
        }
    }
    out
}

/// Highest-SINR active cell for one UE row; ties go to the lowest id.
fn best_cell(cells: &[CellState], row: &[f64]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (j, c) in cells.iter().enumerate() {
        if c.active && best.map_or(true, |b| row[j] > row[b]) {
            best = Some(j);
        }
    }
    best
}

/// Attaches every UE to its highest-SINR active cell.
pub fn attach_all(cells: &[CellState], ues: &mut [UeState], sinr: &[f64]) {
    let n_bs = cells.len();
    for (i, ue) in ues.iter_mut().enumerate() {
        ue.serving_cell = best_cell(cells, &sinr[i * n_bs..(i + 1) * n_bs]).map(|j| j as u32);
    }
}

/// Moves a UE to cell `k` when its SINR beats the serving cell by more than
/// `hysteresis_db`. UEs whose serving cell went inactive re-attach
/// unconditionally.
pub fn handover_check(
    cells: &[CellState],
    ues: &mut [UeState],
    sinr: &[f64],
    hysteresis_db: f64,
    t_s: f64,
) -> Vec<HandoverEvent> {
    let n_bs = cells.len();
    let mut events = Vec::new();
    for (i, ue) in ues.iter_mut().enumerate() {
        let row = &sinr[i * n_bs..(i + 1) * n_bs];
        let best = best_cell(cells, row).map(|j| j as u32);
        let next = match ue.serving_cell {
            Some(s) if cells[s as usize].active => match best {
                Some(k) if k != s && linear_to_db(row[k as usize]) > linear_to_db(row[s as usize]) + hysteresis_db => {
                    Some(k)
                }
                _ => Some(s),
            },
            _ => best,
        };
        if next != ue.serving_cell {
            events.push(HandoverEvent { t_s, ue_id: ue.ue_id, from: ue.serving_cell, to: next });
            ue.serving_cell = next;
        }
    }
    events
}

/// Outcome of a complete run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub scenario: String,
    pub power_level: PowerLevel,
    pub seed: u64,
    pub n_ue: usize,
    pub n_intervals: u64,
    pub metrics: RunMetrics,
    pub handovers: usize,
    pub rejected: Vec<RejectedCommand>,
}

pub struct Simulation<'a> {
    ctx: &'a SimContext,
    scenario: Scenario,
    level: PowerLevel,
    seed: u64,
    label: Arc<str>,
    cells: Vec<CellState>,
    ues: Vec<UeState>,
    gains: Vec<f64>,
    sinr: Vec<f64>,
    clock: SimClock,
    dirty: bool,
    ue_rows: Vec<UeRow>,
    cell_rows: Vec<CellRow>,
    metrics: RunMetricsAccumulator,
    handovers: Vec<HandoverEvent>,
    rejected: Vec<RejectedCommand>,
}

impl<'a> Simulation<'a> {
    /// Builds cells from the site plan, applies the scenario's power level
    /// to K^v and places the UEs for `seed`.
    pub fn new(ctx: &'a SimContext, scenario: &Scenario, level: PowerLevel, seed: u64) -> Result<Self, EngineError> {
        let net = &ctx.config.network;
        let ues = match ctx.config.run.fixed_ue_count {
            Some(n) => place_ues_exact(&ctx.region, n, net.ue_height_m, seed)?,
            None => place_ues(&ctx.region, net.ue_density_per_km2, net.ue_height_m, seed)?,
        };
        Self::with_ues(ctx, scenario, level, seed, ues)
    }

    /// As [`Simulation::new`] with caller-supplied UE positions.
    pub fn with_ues(
        ctx: &'a SimContext,
        scenario: &Scenario,
        level: PowerLevel,
        seed: u64,
        positions: Vec<Point3>,
    ) -> Result<Self, EngineError> {
        let n_bs = ctx.n_bs();
        scenario.validate(n_bs)?;
        let p_max = ctx.power.p_max_w();
        let kv_power = level.resolve_w(p_max)?;
        let cells: Vec<CellState> = ctx
            .plan
            .sites
            .iter()
            .map(|s| {
                let variable = scenario.is_variable(s.cell_id);
                let p = if variable { kv_power } else { Some(p_max) };
                CellState {
                    cell_id: s.cell_id,
                    position: s.position,
                    p_tx_w: p.unwrap_or(0.0),
                    active: p.is_some(),
                    group: if variable { CellGroup::Variable } else { CellGroup::Static },
                }
            })
            .collect();

        let net = &ctx.config.network;
        let link = &ctx.config.link;
        let gain_db = link.budget().gain_db();
        let mut gains = Vec::with_capacity(positions.len() * cells.len());
        for ue in &positions {
            for c in &cells {
                let pl = link.pathloss.pathloss_db(&c.position, ue, net.carrier_freq_hz)?;
                gains.push(db_to_linear(gain_db - pl));
            }
        }
        let ues = positions
            .into_iter()
            .enumerate()
            .map(|(i, p)| UeState::unattached(i as u32, p))
            .collect();
        let run = &ctx.config.run;
        Ok(Self {
            ctx,
            scenario: scenario.clone(),
            level,
            seed,
            label: Arc::from(scenario.name.as_str()),
            cells,
            ues,
            gains,
            sinr: Vec::new(),
            clock: SimClock::new(run.interval_s, run.tau_s),
            dirty: true,
            ue_rows: Vec::new(),
            cell_rows: Vec::new(),
            metrics: RunMetricsAccumulator::new(scenario, n_bs, net.bandwidth_hz, run.empty_cell_mean),
            handovers: Vec::new(),
            rejected: Vec::new(),
        })
    }

    pub fn cells(&self) -> &[CellState] {
        &self.cells
    }

    pub fn ues(&self) -> &[UeState] {
        &self.ues
    }

    pub fn clock(&self) -> &SimClock {
        &self.clock
    }

    /// Linear SINR for `(ue, cell)` under the current cell states.
    pub fn sinr_linear(&self, ue: usize, cell: usize) -> f64 {
        self.sinr[ue * self.cells.len() + cell]
    }

    pub fn handovers(&self) -> &[HandoverEvent] {
        &self.handovers
    }

    pub fn rejected(&self) -> &[RejectedCommand] {
        &self.rejected
    }

    pub fn view(&self) -> SimView<'_> {
        SimView { t_s: self.clock.now_s, cells: &self.cells, ues: &self.ues, p_max_w: self.ctx.power.p_max_w() }
    }

    fn validate_command(&self, cmd: &Command) -> Result<(), String> {
        let id = cmd.cell_id();
        let cell = self
            .cells
            .get(id as usize)
            .ok_or_else(|| format!("unknown cell_id {id}"))?;
        let p_max = self.ctx.power.p_max_w();
        match *cmd {
            Command::SetPower { p_tx_w, .. } | Command::Wake { p_tx_w, .. } => {
                if !(p_tx_w > 0.0 && p_tx_w <= p_max) {
                    return Err(format!("p_tx_w {p_tx_w} outside (0, {p_max}]"));
                }
                if matches!(cmd, Command::SetPower { .. }) && !cell.active {
                    return Err(format!("cell {id} is asleep; use wake"));
                }
            }
            Command::Sleep { .. } => {}
        }
        Ok(())
    }

    /// Validates and applies commands in order; invalid ones are recorded
    /// and skipped.
    pub fn apply_commands(&mut self, commands: Vec<Command>) {
        for cmd in commands {
            if let Err(reason) = self.validate_command(&cmd) {
                log::warn!("rejected {cmd} at t={}: {reason}", self.clock.now_s);
                self.rejected.push(RejectedCommand { t_s: self.clock.now_s, command: cmd, reason });
                continue;
            }
            let cell = &mut self.cells[cmd.cell_id() as usize];
            let (p, active) = match cmd {
                Command::SetPower { p_tx_w, .. } | Command::Wake { p_tx_w, .. } => (p_tx_w, true),
                Command::Sleep { .. } => (0.0, false),
            };
            if cell.p_tx_w.to_bits() != p.to_bits() || cell.active != active {
                cell.p_tx_w = p;
                cell.active = active;
                self.dirty = true;
            }
        }
    }

    fn refresh(&mut self) -> Result<(), EngineError> {
        let first = self.sinr.is_empty();
        let t = self.clock.now_s;
        self.sinr = sinr_matrix(&self.cells, &self.gains, self.ues.len(), self.ctx.noise_w);
        if first {
            attach_all(&self.cells, &mut self.ues, &self.sinr);
        } else {
            let hyst = self.ctx.config.run.hysteresis_db;
            let events = handover_check(&self.cells, &mut self.ues, &self.sinr, hyst, t);
            self.handovers.extend(events);
        }
        self.update_ues()?;
        self.rebuild_rows()?;
        self.dirty = false;
        Ok(())
    }

    fn update_ues(&mut self) -> Result<(), EngineError> {
        let n_bs = self.cells.len();
        let tables = &self.ctx.tables;
        let bw = self.ctx.config.network.bandwidth_hz;
        let mut load = vec![0u32; n_bs];
        for ue in &self.ues {
            if let Some(s) = ue.serving_cell {
                load[s as usize] += 1;
            }
        }
        let share = self.ctx.config.run.share_bandwidth;
        for (i, ue) in self.ues.iter_mut().enumerate() {
            match ue.serving_cell {
                None => *ue = UeState::unattached(ue.ue_id, ue.position),
                Some(s) => {
                    let sinr_db = linear_to_db(self.sinr[i * n_bs + s as usize]);
                    let cqi = tables.sinr_to_cqi(sinr_db);
                    let mcs = tables.cqi_to_mcs(cqi)?;
                    let se = tables.se_or_zero(mcs)?;
                    let ue_bw = if share { bw / load[s as usize] as f64 } else { bw };
                    ue.sinr_db = sinr_db;
                    ue.cqi = cqi;
                    ue.mcs = mcs;
                    ue.se_bps_hz = se;
                    ue.throughput_bps = crate::radio::ue_throughput_bps(se, ue_bw);
                }
            }
        }
        Ok(())
    }

    fn rebuild_rows(&mut self) -> Result<(), EngineError> {
        let t = self.clock.now_s;
        let seed = self.seed;
        self.ue_rows = self
            .ues
            .iter()
            .map(|u| UeRow {
                t_s: t,
                seed,
                scenario: self.label.clone(),
                ue_id: u.ue_id,
                serving_cell: u.serving_cell,
                sinr_db: u.sinr_db,
                cqi: u.cqi.0,
                mcs: u.mcs.map(|m| m.0),
                se_bps_hz: u.se_bps_hz,
                throughput_mbps: u.throughput_bps / 1e6,
            })
            .collect();
        let n_bs = self.cells.len();
        let mut sum = vec![0.0; n_bs];
        let mut count = vec![0u32; n_bs];
        for r in &self.ue_rows {
            if let Some(s) = r.serving_cell {
                sum[s as usize] += r.throughput_mbps;
                count[s as usize] += 1;
            }
        }
        self.cell_rows = Vec::with_capacity(n_bs);
        for (j, c) in self.cells.iter().enumerate() {
            let p_tx = c.active.then_some(c.p_tx_w);
            self.cell_rows.push(CellRow {
                t_s: t,
                seed,
                scenario: self.label.clone(),
                cell_id: c.cell_id,
                group: c.group,
                p_tx_dbm: p_tx.map_or(f64::NEG_INFINITY, w_to_dbm),
                p_cons_w: self.ctx.power.consumption_w(p_tx)?,
                n_attached: count[j],
                mean_tp_mbps: if count[j] == 0 { 0.0 } else { sum[j] / count[j] as f64 },
            });
        }
        Ok(())
    }

    /// One interval: hook, commands, handover and UE recompute (when cell
    /// state changed), power, log rows, clock advance.
    pub fn step<H: RicHook + ?Sized>(&mut self, hook: Option<&mut H>, sink: &mut dyn LogSink) -> Result<(), EngineError> {
        if let Some(h) = hook {
            let commands = h.on_interval(&self.view());
            self.apply_commands(commands);
        }
        if self.dirty {
            self.refresh()?;
        } else {
            let t = self.clock.now_s;
            self.ue_rows.iter_mut().for_each(|r| r.t_s = t);
            self.cell_rows.iter_mut().for_each(|r| r.t_s = t);
        }
        sink.ue_rows(&self.ue_rows);
        sink.cell_rows(&self.cell_rows);
        self.metrics.push_interval(&self.cell_rows)?;
        self.clock.advance();
        Ok(())
    }

    pub fn run_to_end(mut self, mut hook: Option<&mut dyn RicHook>, sink: &mut dyn LogSink) -> Result<RunRecord, EngineError> {
        while !self.clock.finished() {
            self.step(hook.as_deref_mut(), sink)?;
        }
        Ok(RunRecord {
            scenario: self.scenario.name.clone(),
            power_level: self.level,
            seed: self.seed,
            n_ue: self.ues.len(),
            n_intervals: self.clock.step_index(),
            metrics: self.metrics.finish()?,
            handovers: self.handovers.len(),
            rejected: self.rejected,
        })
    }
}

/// Runs one (scenario, power level, seed) to τ.
pub fn run(
    ctx: &SimContext,
    scenario: &Scenario,
    level: PowerLevel,
    seed: u64,
    hook: Option<&mut dyn RicHook>,
    sink: &mut dyn LogSink,
) -> Result<RunRecord, EngineError> {
    Simulation::new(ctx, scenario, level, seed)?.run_to_end(hook, sink)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::RunConfig;
    use crate::records::{MemorySink, NullSink};

    fn ctx_with(json: &str) -> SimContext {
        SimContext::new(RunConfig::from_json(json).unwrap()).unwrap()
    }

    fn small_ctx() -> SimContext {
        ctx_with(r#"{"run": {"tau_s": 5, "fixed_ue_count": 200}}"#)
    }

    #[test]
    fn clock_counts() {
        assert_eq!(SimClock::new(1.0, 100.0).total_steps(), 100);
        assert_eq!(SimClock::new(0.1, 1.0).total_steps(), 10);
        assert_eq!(SimClock::new(3.0, 10.0).total_steps(), 3);
    }

    #[test]
    fn static_scene_rows_repeat() {
        let ctx = small_ctx();
        let mut sink = MemorySink::default();
        let rec = run(&ctx, &Scenario::builtin("centre").unwrap(), PowerLevel::Dbm(37.0), 3, None, &mut sink).unwrap();
        assert_eq!(rec.n_intervals, 5);
        assert_eq!(sink.cell.len(), 5 * 19);
        assert_eq!(sink.ue.len(), 5 * 200);
        for k in 1..5 {
            for j in 0..19 {
                let (a, b) = (&sink.cell[j], &sink.cell[k * 19 + j]);
                assert_eq!(b.t_s, k as f64);
                assert_eq!((a.p_cons_w, a.mean_tp_mbps, a.n_attached), (b.p_cons_w, b.mean_tp_mbps, b.n_attached));
            }
        }
        assert_eq!(rec.handovers, 0);
    }

    #[test]
    fn single_active_cell_takes_everyone() {
        let ctx = small_ctx();
        let others: Vec<u32> = (0..19).filter(|&c| c != 9).collect();
        let sc = Scenario { name: "all-but-9".into(), variable_cells: others };
        let mut sink = MemorySink::default();
        run(&ctx, &sc, PowerLevel::Sleep, 1, None, &mut sink).unwrap();
        assert!(sink.ue.iter().all(|u| u.serving_cell == Some(9)));
        assert_eq!(sink.cell[9].n_attached, 200);
    }

    #[test]
    fn all_asleep_leaves_ues_unattached() {
        let ctx = small_ctx();
        let sc = Scenario { name: "dark".into(), variable_cells: (0..19).collect() };
        let mut sink = MemorySink::default();
        let rec = run(&ctx, &sc, PowerLevel::Sleep, 1, None, &mut sink).unwrap();
        assert!(sink.ue.iter().all(|u| u.serving_cell.is_none() && u.throughput_mbps == 0.0));
        assert_eq!(rec.metrics.union.t_set_mbps, 0.0);
        assert!(sink.cell.iter().all(|c| c.p_tx_dbm == f64::NEG_INFINITY));
    }

    #[test]
    fn tie_goes_to_lower_id() {
        let cells: Vec<CellState> = (0..3)
            .map(|j| CellState {
                cell_id: j,
                position: Point3::new(0.0, 0.0, 25.0),
                p_tx_w: 1.0,
                active: true,
                group: CellGroup::Static,
            })
            .collect();
        let mut ues = vec![UeState::unattached(0, Point3::new(1.0, 0.0, 1.5))];
        attach_all(&cells, &mut ues, &[0.5, 0.7, 0.7]);
        assert_eq!(ues[0].serving_cell, Some(1));
    }

    #[test]
    fn hysteresis_threshold() {
        let cells: Vec<CellState> = (0..2)
            .map(|j| CellState {
                cell_id: j,
                position: Point3::new(0.0, 0.0, 25.0),
                p_tx_w: 1.0,
                active: true,
                group: CellGroup::Static,
            })
            .collect();
        let mut ues = vec![UeState::unattached(0, Point3::new(1.0, 0.0, 1.5))];
        ues[0].serving_cell = Some(0);
        let sinr = [1.0, db_to_linear(2.0)];
        assert!(handover_check(&cells, &mut ues, &sinr, 3.0, 0.0).is_empty());
        let ev = handover_check(&cells, &mut ues, &sinr, 1.0, 0.0);
        assert_eq!(ev, vec![HandoverEvent { t_s: 0.0, ue_id: 0, from: Some(0), to: Some(1) }]);
        assert!(handover_check(&cells, &mut ues, &sinr, 0.0, 0.0).is_empty());
    }

    #[test]
    fn sleeping_serving_cell_forces_reattach() {
        let ctx = small_ctx();
        let mut sim = Simulation::new(&ctx, &Scenario::baseline(), PowerLevel::Dbm(43.0), 2).unwrap();
        let mut sink = NullSink;
        sim.step(None::<&mut dyn RicHook>, &mut sink).unwrap();
        let on_9 = sim.ues().iter().filter(|u| u.serving_cell == Some(9)).count();
        assert!(on_9 > 0);
        let mut hook = |_: &SimView<'_>| vec![Command::Sleep { cell_id: 9 }];
        sim.step(Some(&mut hook), &mut sink).unwrap();
        assert!(sim.ues().iter().all(|u| u.serving_cell != Some(9)));
        assert_eq!(sim.handovers().len(), on_9);
    }

    #[test]
    fn bad_commands_are_rejected_whole() {
        let ctx = small_ctx();
        let mut sim = Simulation::new(&ctx, &Scenario::baseline(), PowerLevel::Dbm(43.0), 2).unwrap();
        sim.apply_commands(vec![
            Command::SetPower { cell_id: 30, p_tx_w: 5.0 },
            Command::SetPower { cell_id: 3, p_tx_w: 25.0 },
            Command::Wake { cell_id: 3, p_tx_w: 0.0 },
            Command::Sleep { cell_id: 4 },
            Command::SetPower { cell_id: 4, p_tx_w: 5.0 },
        ]);
        assert_eq!(sim.rejected().len(), 4);
        assert_eq!(sim.cells()[3].p_tx_w, 20.0);
        assert!(!sim.cells()[4].active);
    }

    #[test]
    fn invalid_scenario_fails_at_startup() {
        let ctx = small_ctx();
        let sc: Scenario = "19".parse().unwrap();
        assert!(matches!(
            run(&ctx, &sc, PowerLevel::Sleep, 0, None, &mut NullSink),
            Err(EngineError::Scenario(ScenarioError::UnknownCell { .. }))
        ));
    }

    #[test]
    fn centre_scenario_groups() {
        let ctx = small_ctx();
        let mut sink = MemorySink::default();
        run(&ctx, &Scenario::builtin("centre").unwrap(), PowerLevel::Dbm(37.0), 0, None, &mut sink).unwrap();
        let variable: Vec<u32> =
            sink.cell[..19].iter().filter(|c| c.group == CellGroup::Variable).map(|c| c.cell_id).collect();
        assert_eq!(variable, vec![9]);
    }

    #[test]
    fn full_power_scenario_equals_baseline() {
        let ctx = small_ctx();
        let mut a = MemorySink::default();
        let mut b = MemorySink::default();
        let ra = run(&ctx, &Scenario::builtin("central-triad").unwrap(), PowerLevel::Dbm(43.0), 5, None, &mut a).unwrap();
        let rb = run(&ctx, &Scenario::baseline(), PowerLevel::Dbm(43.0), 5, None, &mut b).unwrap();
        assert_eq!(ra.metrics.union, rb.metrics.union);
        for (x, y) in a.ue.iter().zip(&b.ue) {
            assert_eq!((x.serving_cell, x.throughput_mbps), (y.serving_cell, y.throughput_mbps));
        }
    }
}
