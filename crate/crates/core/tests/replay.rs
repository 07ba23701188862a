//! Metrics recomputed from CSV logs match the engine's own.

use hexwatt::metrics::{mean_bs_throughput, metrics_from_cell_log};
use hexwatt::records::{read_cell_log, read_ue_log, CsvSink};
use hexwatt::{run, PowerLevel, RunConfig, Scenario, SimContext};

#[test]
fn csv_replay_is_bit_exact() {
    let ctx = SimContext::new(RunConfig::from_json(r#"{"run": {"tau_s": 4}}"#).unwrap()).unwrap();
    for (sc, level) in [
        (Scenario::builtin("centre").unwrap(), PowerLevel::Dbm(37.0)),
        (Scenario::builtin("inner-ring-alternate").unwrap(), PowerLevel::Sleep),
    ] {
        let mut sink = CsvSink::new(Vec::new(), Vec::new());
        let rec = run(&ctx, &sc, level, 42, None, &mut sink).unwrap();
        let (ue_csv, cell_csv) = sink.into_inner().unwrap();
        let cells = read_cell_log(&cell_csv[..]).unwrap();
        let ues = read_ue_log(&ue_csv[..]).unwrap();
        assert_eq!(cells.len(), 4 * 19);
        assert_eq!(ues.len(), 4 * rec.n_ue);

        let replayed = metrics_from_cell_log(
            &cells,
            &sc,
            19,
            ctx.config.network.bandwidth_hz,
            ctx.config.run.empty_cell_mean,
        )
        .unwrap();
        assert_eq!(replayed, rec.metrics);

        let slice: Vec<_> = ues.iter().filter(|u| u.t_s == 0.0).cloned().collect();
        for c in cells.iter().filter(|c| c.t_s == 0.0) {
            assert_eq!(mean_bs_throughput(c.cell_id, &slice).to_bits(), c.mean_tp_mbps.to_bits());
            let n = slice.iter().filter(|u| u.serving_cell == Some(c.cell_id)).count();
            assert_eq!(n as u32, c.n_attached);
        }
    }
}

#[test]
fn identical_inputs_give_identical_bytes() {
    let ctx = SimContext::new(RunConfig::from_json(r#"{"run": {"tau_s": 3}}"#).unwrap()).unwrap();
    let sc = Scenario::builtin("central-triad").unwrap();
    let once = || {
        let mut sink = CsvSink::new(Vec::new(), Vec::new());
        run(&ctx, &sc, PowerLevel::Dbm(22.0), 9, None, &mut sink).unwrap();
        sink.into_inner().unwrap()
    };
    assert_eq!(once(), once());
}
