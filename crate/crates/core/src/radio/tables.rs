//! SINR→CQI thresholds and MCS→spectral-efficiency lookup tables.
//!
//! The default tables are compiled in from `data/`. Their SHA-256 digests are
//! pinned below and in `data/SHA256SUMS`; every regression constant in the
//! test suites assumes these exact files.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::RadioError;

pub const DEFAULT_CQI_CSV: &str = include_str!("../../data/cqi_thresholds.csv");
pub const DEFAULT_MCS_CSV: &str = include_str!("../../data/mcs_se.csv");
/// 256QAM MCS table (indices 0..=27), selectable through the config.
pub const MCS_256QAM_CSV: &str = include_str!("../../data/mcs_se_256qam.csv");

pub const DEFAULT_CQI_SHA256: &str =
    "fd963e2ea3be9c330daad554bc333b3ac501c05110e9e487b86ed5342d397202";
pub const DEFAULT_MCS_SHA256: &str =
    "44caf5dcb901b0c54cf75252681a52fb7d5261bf55727c231db4f59244fdd5cb";
pub const MCS_256QAM_SHA256: &str =
    "c8c8576aa8023e8f469d5000f83e301b451e661764369b57aaeaf4253bb79786";

pub const CQI_LEVELS: usize = 15;
pub const MAX_SPECTRAL_EFFICIENCY: f64 = 9.6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Cqi(pub u8);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Mcs(pub u8);

/// How a CQI of 1..=15 is scaled onto the MCS index range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CqiMcsMap {
    /// `round((cqi - 1) · top / 14)`: CQI 1 → MCS 0, CQI 15 → top index.
    #[default]
    Affine,
    /// `min(top, floor(cqi · top / 15))`.
    Proportional,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    use std::fmt::Write;
    Sha256::digest(bytes).iter().fold(String::new(), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinkTables {
    cqi_thresholds_db: Vec<f64>,
    mcs_se: Vec<f64>,
    map: CqiMcsMap,
}

#[derive(Deserialize)]
struct CqiRow {
    cqi: u8,
    min_sinr_db: f64,
}

#[derive(Deserialize)]
struct McsRow {
    mcs: u8,
    se_bits_per_hz: f64,
}

fn table_err(what: &str, e: impl std::fmt::Display) -> RadioError {
    RadioError::Table(format!("{what}: {e}"))
}

impl LinkTables {
    /// The shipped tables with the default CQI→MCS map.
    pub fn shipped() -> Self {
        Self::from_csv(DEFAULT_CQI_CSV, DEFAULT_MCS_CSV, CqiMcsMap::Affine)
            .expect("shipped link tables are valid")
    }

    pub fn from_csv(cqi_csv: &str, mcs_csv: &str, map: CqiMcsMap) -> Result<Self, RadioError> {
        let mut thresholds = Vec::new();
        for (i, row) in csv::Reader::from_reader(cqi_csv.as_bytes()).deserialize().enumerate() {
            let row: CqiRow = row.map_err(|e| table_err("cqi table", e))?;
            if row.cqi as usize != i + 1 {
                return Err(table_err("cqi table", format!("row {i} has cqi {}", row.cqi)));
            }
            thresholds.push(row.min_sinr_db);
        }
        let mut se = Vec::new();
        for (i, row) in csv::Reader::from_reader(mcs_csv.as_bytes()).deserialize().enumerate() {
            let row: McsRow = row.map_err(|e| table_err("mcs table", e))?;
            if row.mcs as usize != i {
                return Err(table_err("mcs table", format!("row {i} has mcs {}", row.mcs)));
            }
            se.push(row.se_bits_per_hz);
        }
        Self::new(thresholds, se, map)
    }

    /// Loads both tables from disk and checks each against its expected digest.
    pub fn from_files(
        cqi_path: &Path,
        cqi_sha256: &str,
        mcs_path: &Path,
        mcs_sha256: &str,
        map: CqiMcsMap,
    ) -> Result<Self, RadioError> {
        let read = |p: &Path, want: &str| -> Result<String, RadioError> {
            let bytes = std::fs::read(p)
                .map_err(|e| RadioError::TableFile(p.display().to_string(), e.to_string()))?;
            let got = sha256_hex(&bytes);
            if !got.eq_ignore_ascii_case(want) {
                return Err(RadioError::Checksum {
                    path: p.display().to_string(),
                    expected: want.to_string(),
                    actual: got,
                });
            }
            String::from_utf8(bytes).map_err(|e| table_err(&p.display().to_string(), e))
        };
        let cqi = read(cqi_path, cqi_sha256)?;
        let mcs = read(mcs_path, mcs_sha256)?;
        Self::from_csv(&cqi, &mcs, map)
    }

    pub fn new(cqi_thresholds_db: Vec<f64>, mcs_se: Vec<f64>, map: CqiMcsMap) -> Result<Self, RadioError> {
        if cqi_thresholds_db.len() != CQI_LEVELS {
            return Err(table_err(
                "cqi table",
                format!("expected {CQI_LEVELS} thresholds, got {}", cqi_thresholds_db.len()),
            ));
        }
        if cqi_thresholds_db.iter().any(|t| !t.is_finite())
            || cqi_thresholds_db.windows(2).any(|w| w[0] >= w[1])
        {
            return Err(table_err("cqi table", "thresholds must be finite and strictly ascending"));
        }
        if mcs_se.len() < 2 || mcs_se.len() > 256 {
            return Err(table_err("mcs table", format!("{} entries", mcs_se.len())));
        }
        if mcs_se.iter().any(|&s| !(s > 0.0 && s <= MAX_SPECTRAL_EFFICIENCY)) {
            return Err(table_err(
                "mcs table",
                format!("efficiencies must lie in (0, {MAX_SPECTRAL_EFFICIENCY}]"),
            ));
        }
        let tables = Self { cqi_thresholds_db, mcs_se, map };
        // The table itself may dip at a modulation switch; the entries the
        // CQI path actually reaches must rise so throughput is monotone in SINR.
        let reached: Vec<f64> = (1..=CQI_LEVELS as u8)
            .map(|c| tables.mcs_se[tables.map_cqi(c) as usize])
            .collect();
        if reached.windows(2).any(|w| w[0] >= w[1]) {
            return Err(table_err(
                "mcs table",
                "efficiency is not strictly ascending along the CQI→MCS map",
            ));
        }
        Ok(tables)
    }

    pub fn cqi_thresholds_db(&self) -> &[f64] {
        &self.cqi_thresholds_db
    }

    pub fn mcs_se(&self) -> &[f64] {
        &self.mcs_se
    }

    pub fn max_mcs(&self) -> Mcs {
        Mcs((self.mcs_se.len() - 1) as u8)
    }

    /// True when every MCS entry is strictly above its predecessor.
    pub fn mcs_strictly_ascending(&self) -> bool {
        self.mcs_se.windows(2).all(|w| w[0] < w[1])
    }

    /// Largest CQI whose threshold is at or below `sinr_db`; 0 below the first.
    pub fn sinr_to_cqi(&self, sinr_db: f64) -> Cqi {
        Cqi(self.cqi_thresholds_db.partition_point(|&t| t <= sinr_db) as u8)
    }

    fn map_cqi(&self, cqi: u8) -> u8 {
        let top = self.mcs_se.len() as u32 - 1;
        match self.map {
            CqiMcsMap::Affine => {
                libm::round((cqi as f64 - 1.0) * top as f64 / (CQI_LEVELS as f64 - 1.0)) as u8
            }
            CqiMcsMap::Proportional => (cqi as u32 * top / CQI_LEVELS as u32).min(top) as u8,
        }
    }

    /// `None` for CQI 0, i.e. no transmission.
    pub fn cqi_to_mcs(&self, cqi: Cqi) -> Result<Option<Mcs>, RadioError> {
        match cqi.0 {
            0 => Ok(None),
            c if c as usize <= CQI_LEVELS => Ok(Some(Mcs(self.map_cqi(c)))),
            c => Err(RadioError::CqiOutOfRange(c)),
        }
    }

    pub fn mcs_to_se(&self, mcs: Mcs) -> Result<f64, RadioError> {
        self.mcs_se
            .get(mcs.0 as usize)
            .copied()
            .ok_or(RadioError::McsOutOfRange(mcs.0))
    }

    /// SE for an optional MCS; the no-transmission sentinel yields 0.
    pub fn se_or_zero(&self, mcs: Option<Mcs>) -> Result<f64, RadioError> {
        mcs.map_or(Ok(0.0), |m| self.mcs_to_se(m))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    // Qm and code rate × 1024 from the 64QAM PDSCH MCS table; SE is
    // Qm · R / 1024 rounded to four decimals.
    const MCS_QM_RATE: [(u32, f64); 29] = [
        (2, 120.0), (2, 157.0), (2, 193.0), (2, 251.0), (2, 308.0), (2, 379.0),
        (2, 449.0), (2, 526.0), (2, 602.0), (2, 679.0), (4, 340.0), (4, 378.0),
        (4, 434.0), (4, 490.0), (4, 553.0), (4, 616.0), (4, 658.0), (6, 438.0),
        (6, 466.0), (6, 517.0), (6, 567.0), (6, 616.0), (6, 666.0), (6, 719.0),
        (6, 772.0), (6, 822.0), (6, 873.0), (6, 910.0), (6, 948.0),
    ];

    fn linear_scan_cqi(thresholds: &[f64], sinr_db: f64) -> u8 {
        let mut cqi = 0;
        for (k, &t) in thresholds.iter().enumerate() {
            if t <= sinr_db {
                cqi = k as u8 + 1;
            }
        }
        cqi
    }

    #[test]
    fn shipped_digests_match() {
        assert_eq!(sha256_hex(DEFAULT_CQI_CSV.as_bytes()), DEFAULT_CQI_SHA256);
        assert_eq!(sha256_hex(DEFAULT_MCS_CSV.as_bytes()), DEFAULT_MCS_SHA256);
        assert_eq!(sha256_hex(MCS_256QAM_CSV.as_bytes()), MCS_256QAM_SHA256);
        let sums = include_str!("../../data/SHA256SUMS");
        for (digest, file) in [
            (DEFAULT_CQI_SHA256, "cqi_thresholds.csv"),
            (DEFAULT_MCS_SHA256, "mcs_se.csv"),
            (MCS_256QAM_SHA256, "mcs_se_256qam.csv"),
        ] {
            assert!(sums.contains(&format!("{digest}  {file}")));
        }
    }

    #[test]
    fn mcs_table_matches_modulation_and_rate() {
        let t = LinkTables::shipped();
        assert_eq!(t.mcs_se().len(), 29);
        for (i, &(qm, rate)) in MCS_QM_RATE.iter().enumerate() {
            let se = (qm as f64 * rate / 1024.0 * 1e4).round() / 1e4;
            assert_eq!(t.mcs_to_se(Mcs(i as u8)).unwrap(), se, "mcs {i}");
        }
        assert_eq!(t.mcs_to_se(Mcs(0)).unwrap(), 0.2344);
        assert_eq!(t.mcs_to_se(Mcs(28)).unwrap(), 5.5547);
    }

    #[test]
    fn high_order_table_top_entry() {
        let t = LinkTables::from_csv(DEFAULT_CQI_CSV, MCS_256QAM_CSV, CqiMcsMap::Affine).unwrap();
        assert_eq!(t.max_mcs(), Mcs(27));
        assert_eq!(t.mcs_to_se(Mcs(27)).unwrap(), 7.4063);
        assert!(t.mcs_strictly_ascending());
        assert_eq!(t.cqi_to_mcs(Cqi(15)).unwrap(), Some(Mcs(27)));
    }

    #[test]
    fn shipped_table_has_modulation_switch_dip() {
        let t = LinkTables::shipped();
        assert!(!t.mcs_strictly_ascending());
        assert!(t.mcs_se()[17] < t.mcs_se()[16]);
    }

    #[test]
    fn cqi_edges() {
        let t = LinkTables::shipped();
        assert_eq!(t.sinr_to_cqi(f64::NEG_INFINITY), Cqi(0));
        assert_eq!(t.sinr_to_cqi(-6.71), Cqi(0));
        assert_eq!(t.sinr_to_cqi(22.7), Cqi(15));
        assert_eq!(t.sinr_to_cqi(80.0), Cqi(15));
        for (k, &th) in t.cqi_thresholds_db().iter().enumerate() {
            assert_eq!(t.sinr_to_cqi(th), Cqi(k as u8 + 1));
            assert_eq!(t.sinr_to_cqi(th).0, linear_scan_cqi(t.cqi_thresholds_db(), th));
        }
    }

    #[test]
    fn affine_cqi_to_mcs() {
        let t = LinkTables::shipped();
        assert_eq!(t.cqi_to_mcs(Cqi(0)).unwrap(), None);
        assert_eq!(t.cqi_to_mcs(Cqi(1)).unwrap(), Some(Mcs(0)));
        assert_eq!(t.cqi_to_mcs(Cqi(8)).unwrap(), Some(Mcs(14)));
        assert_eq!(t.cqi_to_mcs(Cqi(15)).unwrap(), Some(Mcs(28)));
        for c in 1..=15u8 {
            assert_eq!(t.cqi_to_mcs(Cqi(c)).unwrap(), Some(Mcs(2 * (c - 1))));
        }
        assert_eq!(t.cqi_to_mcs(Cqi(16)), Err(RadioError::CqiOutOfRange(16)));
    }

    #[test]
    fn proportional_map_is_selectable() {
        let t = LinkTables::from_csv(DEFAULT_CQI_CSV, DEFAULT_MCS_CSV, CqiMcsMap::Proportional).unwrap();
        assert_eq!(t.cqi_to_mcs(Cqi(1)).unwrap(), Some(Mcs(1)));
        assert_eq!(t.cqi_to_mcs(Cqi(15)).unwrap(), Some(Mcs(28)));
    }

    #[test]
    fn mcs_lookup_errors_and_sentinel() {
        let t = LinkTables::shipped();
        assert_eq!(t.mcs_to_se(Mcs(29)), Err(RadioError::McsOutOfRange(29)));
        assert_eq!(t.se_or_zero(None).unwrap(), 0.0);
    }

    #[test]
    fn rejects_bad_tables() {
        let th: Vec<f64> = (0..15).map(|k| k as f64).collect();
        let se: Vec<f64> = (1..=29).map(|k| k as f64 * 0.2).collect();
        assert!(LinkTables::new(th.clone(), se.clone(), CqiMcsMap::Affine).is_ok());
        let mut bad = th.clone();
        bad.swap(3, 4);
        assert!(LinkTables::new(bad, se.clone(), CqiMcsMap::Affine).is_err());
        assert!(LinkTables::new(th[..14].to_vec(), se.clone(), CqiMcsMap::Affine).is_err());
        let mut big = se.clone();
        big[28] = 10.0;
        assert!(LinkTables::new(th.clone(), big, CqiMcsMap::Affine).is_err());
        let mut zero = se;
        zero[0] = 0.0;
        assert!(LinkTables::new(th, zero, CqiMcsMap::Affine).is_err());
    }

    #[test]
    fn file_loading_checks_digest() {
        let dir = std::env::temp_dir().join(format!("hexwatt-tables-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let cqi = dir.join("cqi_thresholds.csv");
        let mcs = dir.join("mcs_se.csv");
        std::fs::write(&cqi, DEFAULT_CQI_CSV).unwrap();
        std::fs::write(&mcs, DEFAULT_MCS_CSV).unwrap();
        let ok = LinkTables::from_files(&cqi, DEFAULT_CQI_SHA256, &mcs, DEFAULT_MCS_SHA256, CqiMcsMap::Affine);
        assert_eq!(ok.unwrap(), LinkTables::shipped());
        let bad = LinkTables::from_files(&cqi, DEFAULT_MCS_SHA256, &mcs, DEFAULT_MCS_SHA256, CqiMcsMap::Affine);
        assert!(matches!(bad, Err(RadioError::Checksum { .. })));
        let missing = LinkTables::from_files(&dir.join("nope.csv"), "", &mcs, "", CqiMcsMap::Affine);
        assert!(matches!(missing, Err(RadioError::TableFile(..))));
        std::fs::remove_dir_all(&dir).unwrap();
    }

    proptest! {
        #[test]
        fn cqi_matches_linear_scan(sinr in -40.0f64..60.0) {
            let t = LinkTables::shipped();
            prop_assert_eq!(t.sinr_to_cqi(sinr).0, linear_scan_cqi(t.cqi_thresholds_db(), sinr));
        }
    }
}
