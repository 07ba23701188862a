//! Per-interval log rows and their CSV encoding.
//!
//! Floats are written in Rust's shortest round-trip form, so parsing a log
//! back yields bit-identical values. Sleeping cells log `p_tx_dbm` as `-inf`.

use std::io::{Read, Write};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CellGroup {
    Variable,
    Static,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UeRow {
    pub t_s: f64,
    pub seed: u64,
    pub scenario: Arc<str>,
    pub ue_id: u32,
    pub serving_cell: Option<u32>,
    #[serde(with = "float_text")]
    pub sinr_db: f64,
    pub cqi: u8,
    pub mcs: Option<u8>,
    pub se_bps_hz: f64,
    pub throughput_mbps: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellRow {
    pub t_s: f64,
    pub seed: u64,
    pub scenario: Arc<str>,
    pub cell_id: u32,
    pub group: CellGroup,
    #[serde(with = "float_text")]
    pub p_tx_dbm: f64,
    pub p_cons_w: f64,
    pub n_attached: u32,
    pub mean_tp_mbps: f64,
}

/// Writes non-finite values as `inf`/`-inf`/`NaN` and finite ones in
/// shortest round-trip form.
mod float_text {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(v)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        let s = String::deserialize(d)?;
        s.trim().parse().map_err(serde::de::Error::custom)
    }
}

/// Receives rows as the engine produces them, one interval at a time.
pub trait LogSink {
    fn ue_rows(&mut self, rows: &[UeRow]);
    fn cell_rows(&mut self, rows: &[CellRow]);
}

/// Discards everything.
#[derive(Debug, Default)]
pub struct NullSink;

impl LogSink for NullSink {
    fn ue_rows(&mut self, _: &[UeRow]) {}
    fn cell_rows(&mut self, _: &[CellRow]) {}
}

#[derive(Debug, Default, Clone)]
pub struct MemorySink {
    pub ue: Vec<UeRow>,
    pub cell: Vec<CellRow>,
}

impl LogSink for MemorySink {
    fn ue_rows(&mut self, rows: &[UeRow]) {
        self.ue.extend_from_slice(rows);
    }

    fn cell_rows(&mut self, rows: &[CellRow]) {
        self.cell.extend_from_slice(rows);
    }
}

/// Streams both logs to CSV writers; the first I/O error is kept.
pub struct CsvSink<U: Write, C: Write> {
    ue: csv::Writer<U>,
    cell: csv::Writer<C>,
    error: Option<csv::Error>,
}

impl<U: Write, C: Write> CsvSink<U, C> {
    pub fn new(ue: U, cell: C) -> Self {
        Self {
            ue: csv::Writer::from_writer(ue),
            cell: csv::Writer::from_writer(cell),
            error: None,
        }
    }

    pub fn finish(mut self) -> csv::Result<()> {
        if let Some(e) = self.error.take() {
            return Err(e);
        }
        self.ue.flush()?;
        self.cell.flush()?;
        Ok(())
    }

    /// Flushes and returns the underlying writers.
    pub fn into_inner(mut self) -> csv::Result<(U, C)> {
        if let Some(e) = self.error.take() {
            return Err(e);
        }
        let ue = self.ue.into_inner().map_err(|e| csv::Error::from(e.into_error()))?;
        let cell = self.cell.into_inner().map_err(|e| csv::Error::from(e.into_error()))?;
        Ok((ue, cell))
    }
}

impl<U: Write, C: Write> LogSink for CsvSink<U, C> {
    fn ue_rows(&mut self, rows: &[UeRow]) {
        if self.error.is_some() {
            return;
        }
        for r in rows {
            if let Err(e) = self.ue.serialize(r) {
                self.error = Some(e);
                return;
            }
        }
    }

    fn cell_rows(&mut self, rows: &[CellRow]) {
        if self.error.is_some() {
            return;
        }
        for r in rows {
            if let Err(e) = self.cell.serialize(r) {
                self.error = Some(e);
                return;
            }
        }
    }
}

pub fn read_ue_log<R: Read>(input: R) -> csv::Result<Vec<UeRow>> {
    csv::Reader::from_reader(input).deserialize().collect()
}

pub fn read_cell_log<R: Read>(input: R) -> csv::Result<Vec<CellRow>> {
    csv::Reader::from_reader(input).deserialize().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cell_row(p_tx_dbm: f64) -> CellRow {
        CellRow {
            t_s: 3.0,
            seed: 42,
            scenario: "centre".into(),
            cell_id: 9,
            group: CellGroup::Variable,
            p_tx_dbm,
            p_cons_w: 1116.489_231_1,
            n_attached: 0,
            mean_tp_mbps: 0.0,
        }
    }

    fn write_cells(rows: &[CellRow]) -> String {
        let mut sink = CsvSink::new(Vec::new(), Vec::new());
        sink.cell_rows(rows);
        let mut out = Vec::new();
        let CsvSink { mut cell, .. } = sink;
        cell.flush().unwrap();
        out.extend(cell.into_inner().unwrap());
        String::from_utf8(out).unwrap()
    }

    #[test]
    fn cell_header_and_sleep_literal() {
        let text = write_cells(&[cell_row(f64::NEG_INFINITY)]);
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "t_s,seed,scenario,cell_id,group,p_tx_dbm,p_cons_w,n_attached,mean_tp_mbps"
        );
        assert_eq!(lines.next().unwrap(), "3.0,42,centre,9,variable,-inf,1116.4892311,0,0.0");
        let back = read_cell_log(text.as_bytes()).unwrap();
        assert_eq!(back[0].p_tx_dbm, f64::NEG_INFINITY);
    }

    #[test]
    fn ue_header_and_unattached_row() {
        let row = UeRow {
            t_s: 0.0,
            seed: 1,
            scenario: "centre".into(),
            ue_id: 7,
            serving_cell: None,
            sinr_db: f64::NEG_INFINITY,
            cqi: 0,
            mcs: None,
            se_bps_hz: 0.0,
            throughput_mbps: 0.0,
        };
        let mut sink = MemorySink::default();
        sink.ue_rows(&[row.clone()]);
        let mut w = csv::Writer::from_writer(Vec::new());
        w.serialize(&sink.ue[0]).unwrap();
        let text = String::from_utf8(w.into_inner().unwrap()).unwrap();
        assert_eq!(
            text.lines().next().unwrap(),
            "t_s,seed,scenario,ue_id,serving_cell,sinr_db,cqi,mcs,se_bps_hz,throughput_mbps"
        );
        assert_eq!(text.lines().nth(1).unwrap(), "0.0,1,centre,7,,-inf,0,,0.0,0.0");
        assert_eq!(read_ue_log(text.as_bytes()).unwrap(), vec![row]);
    }

    proptest! {
        #[test]
        fn floats_survive_csv_bit_exactly(p in -50.0f64..50.0, w in 0.0f64..5000.0, tp in 0.0f64..100.0) {
            let mut r = cell_row(p);
            r.p_cons_w = w;
            r.mean_tp_mbps = tp;
            let back = read_cell_log(write_cells(&[r.clone()]).as_bytes()).unwrap();
            prop_assert_eq!(back[0].p_tx_dbm.to_bits(), p.to_bits());
            prop_assert_eq!(back[0].p_cons_w.to_bits(), w.to_bits());
            prop_assert_eq!(back[0].mean_tp_mbps.to_bits(), tp.to_bits());
        }
    }
}
