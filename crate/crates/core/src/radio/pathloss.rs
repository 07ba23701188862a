//! 3D Urban Macro pathloss (3GPP TR 36.873, Table 7.2-1).

use serde::{Deserialize, Serialize};

use super::RadioError;
use crate::topology::Point3;

const SPEED_OF_LIGHT: f64 = 3.0e8;
/// Effective environment height for UMa with UEs below 13 m.
const EFFECTIVE_ENV_HEIGHT_M: f64 = 1.0;

pub const MIN_DISTANCE_3D_M: f64 = 10.0;
pub const MAX_DISTANCE_2D_M: f64 = 5000.0;
pub const MIN_FREQ_HZ: f64 = 0.5e9;
pub const MAX_FREQ_HZ: f64 = 6.0e9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PathlossVariant {
    #[default]
    UmaNlos,
    UmaLos,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PathlossModel {
    pub variant: PathlossVariant,
    pub building_height_m: f64,
    pub street_width_m: f64,
}

impl Default for PathlossModel {
    fn default() -> Self {
        Self {
            variant: PathlossVariant::UmaNlos,
            building_height_m: 20.0,
            street_width_m: 20.0,
        }
    }
}

impl PathlossModel {
    pub fn pathloss_db(&self, tx: &Point3, rx: &Point3, freq_hz: f64) -> Result<f64, RadioError> {
        if !(MIN_FREQ_HZ..=MAX_FREQ_HZ).contains(&freq_hz) {
            return Err(RadioError::FrequencyOutOfRange(freq_hz));
        }
        let d2 = tx.distance_2d(rx);
        let d3 = tx.distance_3d(rx);
        if !(d3 >= MIN_DISTANCE_3D_M && d2 <= MAX_DISTANCE_2D_M) {
            return Err(RadioError::DistanceOutOfRange(d3));
        }
        let (h_bs, h_ut) = (tx.z, rx.z);
        let los = uma_los(d2, d3, h_bs, h_ut, freq_hz);
        Ok(match self.variant {
            PathlossVariant::UmaLos => los,
            PathlossVariant::UmaNlos => {
                los.max(uma_nlos_prime(d3, h_bs, h_ut, freq_hz, self.building_height_m, self.street_width_m))
            }
        })
    }
}

fn log10(x: f64) -> f64 {
    libm::log10(x)
}

fn uma_los(d2: f64, d3: f64, h_bs: f64, h_ut: f64, freq_hz: f64) -> f64 {
    let fc_ghz = freq_hz / 1e9;
    let breakpoint = 4.0 * (h_bs - EFFECTIVE_ENV_HEIGHT_M) * (h_ut - EFFECTIVE_ENV_HEIGHT_M) * freq_hz
        / SPEED_OF_LIGHT;
    if d2 <= breakpoint {
        22.0 * log10(d3) + 28.0 + 20.0 * log10(fc_ghz)
    } else {
        let dh = h_bs - h_ut;
        40.0 * log10(d3) + 28.0 + 20.0 * log10(fc_ghz)
            - 9.0 * log10(breakpoint * breakpoint + dh * dh)
    }
}

fn uma_nlos_prime(d3: f64, h_bs: f64, h_ut: f64, freq_hz: f64, h: f64, w: f64) -> f64 {
    let fc_ghz = freq_hz / 1e9;
    let hr = h / h_bs;
    161.04 - 7.1 * log10(w) + 7.5 * log10(h) - (24.37 - 3.7 * hr * hr) * log10(h_bs)
        + (43.42 - 3.1 * log10(h_bs)) * (log10(d3) - 3.0)
        + 20.0 * log10(fc_ghz)
        - (3.2 * log10(17.625).powi(2) - 4.97)
        - 0.6 * (h_ut - 1.5)
}
