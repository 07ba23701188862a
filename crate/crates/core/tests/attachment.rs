//! Attachment against a brute-force all-pairs SINR argmax in the dBm domain.

use hexwatt::engine::Simulation;
use hexwatt::records::NullSink;
use hexwatt::units::dbm_to_w;
use hexwatt::{PowerLevel, RicHook, RunConfig, Scenario, SimContext};

fn oracle_serving(sim: &Simulation<'_>, ctx: &SimContext) -> Vec<Option<u32>> {
    let budget = ctx.config.link.budget();
    let f = ctx.config.network.carrier_freq_hz;
    let noise_w = dbm_to_w(-174.0 + 10.0 * (ctx.config.network.bandwidth_hz).log10() + budget.noise_figure_db);
    sim.ues()
        .iter()
        .map(|ue| {
            let rx_w: Vec<Option<f64>> = sim
                .cells()
                .iter()
                .map(|c| {
                    c.active.then(|| {
                        let pl = ctx.config.link.pathloss.pathloss_db(&c.position, &ue.position, f).unwrap();
                        let p_dbm = 10.0 * (c.p_tx_w * 1e3).log10();
                        dbm_to_w(budget.g_mimo_db + budget.g_ant_db + p_dbm - pl)
                    })
                })
                .collect();
            let mut best: Option<(u32, f64)> = None;
            for (j, rx) in rx_w.iter().enumerate() {
                let Some(rx) = rx else { continue };
                let interference: f64 =
                    rx_w.iter().enumerate().filter(|(k, _)| *k != j).filter_map(|(_, r)| *r).sum();
                let sinr = rx / (interference + noise_w);
                if best.map_or(true, |(_, b)| sinr > b) {
                    best = Some((j as u32, sinr));
                }
            }
            best.map(|(j, _)| j)
        })
        .collect()
}

fn first_interval<'a>(ctx: &'a SimContext, sc: &Scenario, level: PowerLevel, seed: u64) -> Simulation<'a> {
    let mut sim = Simulation::new(ctx, sc, level, seed).unwrap();
    sim.step(None::<&mut dyn RicHook>, &mut NullSink).unwrap();
    sim
}

#[test]
fn matches_oracle_at_full_density() {
    let ctx = SimContext::new(RunConfig::default()).unwrap();
    for seed in [42, 7, 1234] {
        let sim = first_interval(&ctx, &Scenario::baseline(), PowerLevel::Dbm(43.0), seed);
        assert!(sim.ues().len() > 4000);
        let engine: Vec<Option<u32>> = sim.ues().iter().map(|u| u.serving_cell).collect();
        assert_eq!(engine, oracle_serving(&sim, &ctx), "seed {seed}");
    }
}

#[test]
fn matches_oracle_with_mixed_power_and_sleep() {
    let ctx = SimContext::new(RunConfig::from_json(r#"{"run": {"fixed_ue_count": 1000}}"#).unwrap()).unwrap();
    for sc in Scenario::builtins() {
        for level in [PowerLevel::Dbm(31.0), PowerLevel::Dbm(1.0), PowerLevel::Sleep] {
            let sim = first_interval(&ctx, &sc, level, 42);
            let engine: Vec<Option<u32>> = sim.ues().iter().map(|u| u.serving_cell).collect();
            assert_eq!(engine, oracle_serving(&sim, &ctx), "{} {level}", sc.name);
        }
    }
}

#[test]
fn attachment_matrix_is_a_partial_assignment() {
    let ctx = SimContext::new(RunConfig::from_json(r#"{"run": {"fixed_ue_count": 800}}"#).unwrap()).unwrap();
    let sc = Scenario::builtin("central-triad").unwrap();
    let sim = first_interval(&ctx, &sc, PowerLevel::Sleep, 3);
    let n_bs = sim.cells().len();
    let mut per_cell = vec![0usize; n_bs];
    let mut unattached = 0;
    for ue in sim.ues() {
        let x: Vec<u8> = (0..n_bs as u32).map(|j| u8::from(ue.serving_cell == Some(j))).collect();
        assert!(x.iter().map(|&v| v as u32).sum::<u32>() <= 1);
        match ue.serving_cell {
            Some(j) => per_cell[j as usize] += 1,
            None => unattached += 1,
        }
    }
    assert_eq!(per_cell.iter().sum::<usize>() + unattached, 800);
    for c in [4, 8, 9] {
        assert_eq!(per_cell[c], 0);
    }
}
