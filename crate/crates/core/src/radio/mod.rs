//! Link budget and the SINR → CQI → MCS → SE → throughput chain.

mod pathloss;
mod tables;

pub use pathloss::{
    PathlossModel, PathlossVariant, MAX_DISTANCE_2D_M, MAX_FREQ_HZ, MIN_DISTANCE_3D_M, MIN_FREQ_HZ,
};
pub use tables::{
    sha256_hex, Cqi, CqiMcsMap, LinkTables, Mcs, CQI_LEVELS, DEFAULT_CQI_CSV, DEFAULT_CQI_SHA256,
    DEFAULT_MCS_CSV, DEFAULT_MCS_SHA256, MAX_SPECTRAL_EFFICIENCY, MCS_256QAM_CSV, MCS_256QAM_SHA256,
};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::units::dbm_to_w;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RadioError {
    #[error("link distance {0} m outside the pathloss model's validity range")]
    DistanceOutOfRange(f64),
    #[error("carrier frequency {0} Hz outside 0.5-6 GHz")]
    FrequencyOutOfRange(f64),
    #[error("noise power must be positive, got {0} W")]
    NonPositiveNoise(f64),
    #[error("CQI {0} out of range 0..=15")]
    CqiOutOfRange(u8),
    #[error("MCS {0} not in table")]
    McsOutOfRange(u8),
    #[error("invalid link table: {0}")]
    Table(String),
    #[error("cannot read table file {0}: {1}")]
    TableFile(String, String),
    #[error("checksum mismatch for {path}: expected {expected}, got {actual}")]
    Checksum { path: String, expected: String, actual: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LinkBudget {
    pub g_mimo_db: f64,
    pub g_ant_db: f64,
    pub noise_figure_db: f64,
    pub thermal_noise_density_dbm_hz: f64,
}

impl Default for LinkBudget {
    fn default() -> Self {
        Self {
            g_mimo_db: 0.0,
            g_ant_db: 0.0,
            noise_figure_db: 9.0,
            thermal_noise_density_dbm_hz: -174.0,
        }
    }
}

impl LinkBudget {
    pub fn noise_power_dbm(&self, bandwidth_hz: f64) -> f64 {
        self.thermal_noise_density_dbm_hz + 10.0 * libm::log10(bandwidth_hz) + self.noise_figure_db
    }

    pub fn noise_power_w(&self, bandwidth_hz: f64) -> f64 {
        dbm_to_w(self.noise_power_dbm(bandwidth_hz))
    }

    /// Total gain applied to every link, dB.
    pub fn gain_db(&self) -> f64 {
        self.g_mimo_db + self.g_ant_db
    }
}

/// Received reference-signal power: gains plus transmit power minus pathloss.
pub fn rsrp_dbm(p_tx_dbm: f64, budget: &LinkBudget, pl_db: f64) -> f64 {
    budget.g_mimo_db + budget.g_ant_db + p_tx_dbm - pl_db
}

pub fn sinr_linear(rx_w: f64, interference_w: f64, noise_w: f64) -> Result<f64, RadioError> {
    if !(noise_w > 0.0) {
        return Err(RadioError::NonPositiveNoise(noise_w));
    }
    Ok(rx_w / (interference_w + noise_w))
}

pub fn ue_throughput_bps(se_bps_hz: f64, bandwidth_hz: f64) -> f64 {
    se_bps_hz * bandwidth_hz
}
