//! Variable-power cell sets and transmit-power levels.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::units::{dbm_to_w, w_to_dbm};

/// A requested dBm level this close to `P_max` resolves to `P_max` exactly.
pub const P_MAX_SNAP_DB: f64 = 0.05;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScenarioError {
    #[error("cell id {cell_id} out of range for {n_bs} cells")]
    UnknownCell { cell_id: u32, n_bs: u32 },
    #[error("cell id {0} listed twice")]
    DuplicateCell(u32),
    #[error("unknown scenario '{0}' (built-ins: centre, inner-ring-antipodal, inner-ring-alternate, central-triad, or a comma-separated id list)")]
    UnknownName(String),
    #[error("power level {dbm} dBm exceeds P_max ({p_max_dbm:.2} dBm)")]
    AbovePmax { dbm: f64, p_max_dbm: f64 },
    #[error("invalid power level '{0}'")]
    InvalidLevel(String),
    #[error("invalid seed range '{0}' (expected N or A..B)")]
    InvalidSeeds(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Scenario {
    pub name: String,
    /// Cells whose transmit power is swept (K^v). The rest stay at P_max.
    pub variable_cells: Vec<u32>,
}

pub const BUILTIN_SCENARIOS: [(&str, &[u32]); 4] = [
    ("centre", &[9]),
    ("inner-ring-antipodal", &[8, 10]),
    ("inner-ring-alternate", &[4, 10, 13]),
    ("central-triad", &[4, 8, 9]),
];

impl Scenario {
    pub fn builtin(name: &str) -> Option<Self> {
        BUILTIN_SCENARIOS
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(n, cells)| Self { name: n.to_string(), variable_cells: cells.to_vec() })
    }

    pub fn builtins() -> Vec<Self> {
        BUILTIN_SCENARIOS.iter().map(|(n, _)| Self::builtin(n).unwrap()).collect()
    }

    /// Empty K^v: every cell at P_max.
    pub fn baseline() -> Self {
        Self { name: "baseline".into(), variable_cells: vec![] }
    }

    pub fn validate(&self, n_bs: u32) -> Result<(), ScenarioError> {
        let mut seen = Vec::with_capacity(self.variable_cells.len());
        for &c in &self.variable_cells {
            if c >= n_bs {
                return Err(ScenarioError::UnknownCell { cell_id: c, n_bs });
            }
            if seen.contains(&c) {
                return Err(ScenarioError::DuplicateCell(c));
            }
            seen.push(c);
        }
        Ok(())
    }

    pub fn is_variable(&self, cell_id: u32) -> bool {
        self.variable_cells.contains(&cell_id)
    }
}

impl FromStr for Scenario {
    type Err = ScenarioError;

    /// A built-in name, `baseline`, or a comma-separated list of cell ids.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if let Some(b) = Self::builtin(s) {
            return Ok(b);
        }
        if s == "baseline" {
            return Ok(Self::baseline());
        }
        let ids: Result<Vec<u32>, _> = s.split(',').map(|p| p.trim().parse::<u32>()).collect();
        match ids {
            Ok(ids) if !ids.is_empty() => {
                let name = format!(
                    "cells-{}",
                    ids.iter().map(u32::to_string).collect::<Vec<_>>().join("-")
                );
                Ok(Self { name, variable_cells: ids })
            }
            _ => Err(ScenarioError::UnknownName(s.to_string())),
        }
    }
}

/// Transmit-power setting applied to K^v.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PowerLevel {
    Dbm(f64),
    Sleep,
}

impl PowerLevel {
    /// Transmit power in W, or `None` for sleep.
    pub fn resolve_w(&self, p_max_w: f64) -> Result<Option<f64>, ScenarioError> {
        match *self {
            PowerLevel::Sleep => Ok(None),
            PowerLevel::Dbm(dbm) => {
                let p_max_dbm = w_to_dbm(p_max_w);
                if !dbm.is_finite() {
                    return Err(ScenarioError::InvalidLevel(dbm.to_string()));
                }
                if (dbm - p_max_dbm).abs() <= P_MAX_SNAP_DB {
                    Ok(Some(p_max_w))
                } else if dbm > p_max_dbm {
                    Err(ScenarioError::AbovePmax { dbm, p_max_dbm })
                } else {
                    Ok(Some(dbm_to_w(dbm)))
                }
            }
        }
    }

    pub fn label(&self) -> String {
        self.to_string()
    }

    /// Sort key for plotting: sleep sits left of every finite level.
    pub fn axis_dbm(&self) -> f64 {
        match *self {
            PowerLevel::Dbm(d) => d,
            PowerLevel::Sleep => f64::NEG_INFINITY,
        }
    }
}

impl fmt::Display for PowerLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PowerLevel::Dbm(d) => write!(f, "{d}"),
            PowerLevel::Sleep => f.write_str("sleep"),
        }
    }
}

impl FromStr for PowerLevel {
    type Err = ScenarioError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("sleep") || t == "-inf" {
            return Ok(PowerLevel::Sleep);
        }
        t.parse::<f64>()
            .ok()
            .filter(|d| d.is_finite())
            .map(PowerLevel::Dbm)
            .ok_or_else(|| ScenarioError::InvalidLevel(s.to_string()))
    }
}

impl Serialize for PowerLevel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.label())
    }
}

impl<'de> Deserialize<'de> for PowerLevel {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// 43 dBm down to 1 dBm in 3 dB steps, then sleep: 16 levels.
pub fn default_power_grid() -> Vec<PowerLevel> {
    (0..15)
        .map(|k| PowerLevel::Dbm(43.0 - 3.0 * k as f64))
        .chain(std::iter::once(PowerLevel::Sleep))
        .collect()
}

/// Parses `N` or an inclusive range `A..B`.
pub fn parse_seeds(s: &str) -> Result<Vec<u64>, ScenarioError> {
    let err = || ScenarioError::InvalidSeeds(s.to_string());
    match s.split_once("..") {
        Some((a, b)) => {
            let a: u64 = a.trim().parse().map_err(|_| err())?;
            let b: u64 = b.trim().trim_start_matches('=').parse().map_err(|_| err())?;
            if b < a {
                return Err(err());
            }
            Ok((a..=b).collect())
        }
        None => Ok(vec![s.trim().parse().map_err(|_| err())?]),
    }
}
