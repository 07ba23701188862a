//! Component-level base-station power consumption.
//!
//! `P_BS = N_TRX · N_ant · (P_0 + f(P_tx))` where the load-dependent term
//! `f` scales the PA input power plus RF and baseband processing by the DC,
//! mains-supply and cooling losses. All arithmetic is in Watts.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EnergyError {
    #[error("transmit power {p_w} W outside [0, {p_max_w}] W")]
    TxPowerOutOfRange { p_w: f64, p_max_w: f64 },
    #[error("invalid power model parameter: {0}")]
    InvalidParams(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PowerModelParams {
    pub n_trx: u32,
    pub n_ant: u32,
    pub p0_w: f64,
    pub eta_pa: f64,
    pub p_rf_w: f64,
    pub p_bb_w: f64,
    pub sigma_feed: f64,
    pub sigma_dc: f64,
    pub sigma_ms: f64,
    pub sigma_cool: f64,
    /// Fixed consumption of a sleeping BS. `None` evaluates the model at 0 W.
    pub deep_sleep_w: Option<f64>,
}

impl Default for PowerModelParams {
    fn default() -> Self {
        Self {
            n_trx: 6,
            n_ant: 1,
            p0_w: 130.0,
            eta_pa: 0.311,
            p_rf_w: 12.9,
            p_bb_w: 29.6,
            sigma_feed: 0.5,
            sigma_dc: 0.075,
            sigma_ms: 0.09,
            sigma_cool: 0.10,
            deep_sleep_w: None,
        }
    }
}

impl PowerModelParams {
    pub fn validate(&self) -> Result<(), EnergyError> {
        let bad = |m: String| Err(EnergyError::InvalidParams(m));
        if self.n_trx < 1 || self.n_ant < 1 {
            return bad("n_trx and n_ant must be >= 1".into());
        }
        if !(self.eta_pa > 0.0 && self.eta_pa <= 1.0) {
            return bad(format!("eta_pa must lie in (0, 1], got {}", self.eta_pa));
        }
        for (name, s) in [
            ("sigma_feed", self.sigma_feed),
            ("sigma_dc", self.sigma_dc),
            ("sigma_ms", self.sigma_ms),
            ("sigma_cool", self.sigma_cool),
        ] {
            if !(0.0..1.0).contains(&s) {
                return bad(format!("{name} must lie in [0, 1), got {s}"));
            }
        }
        for (name, p) in [("p0_w", self.p0_w), ("p_rf_w", self.p_rf_w), ("p_bb_w", self.p_bb_w)] {
            if !(p >= 0.0 && p.is_finite()) {
                return bad(format!("{name} must be finite and >= 0, got {p}"));
            }
        }
        if let Some(w) = self.deep_sleep_w {
            if !(w >= 0.0 && w.is_finite()) {
                return bad(format!("deep_sleep_w must be finite and >= 0, got {w}"));
            }
        }
        Ok(())
    }

    fn loss_denominator(&self) -> f64 {
        (1.0 - self.sigma_dc) * (1.0 - self.sigma_ms) * (1.0 - self.sigma_cool)
    }

    /// dP_BS / dP_tx.
    pub fn slope(&self) -> f64 {
        (self.n_trx * self.n_ant) as f64 / (self.eta_pa * (1.0 - self.sigma_feed) * self.loss_denominator())
    }
}

/// Power model bound to a maximum transmit power.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerModel {
    params: PowerModelParams,
    p_max_w: f64,
}

impl PowerModel {
    pub fn new(params: PowerModelParams, p_max_w: f64) -> Result<Self, EnergyError> {
        params.validate()?;
        if !(p_max_w > 0.0 && p_max_w.is_finite()) {
            return Err(EnergyError::InvalidParams(format!("p_max_w = {p_max_w}")));
        }
        Ok(Self { params, p_max_w })
    }

    pub fn params(&self) -> &PowerModelParams {
        &self.params
    }

    pub fn p_max_w(&self) -> f64 {
        self.p_max_w
    }

    fn check(&self, p_tx_w: f64) -> Result<(), EnergyError> {
        if p_tx_w >= 0.0 && p_tx_w <= self.p_max_w {
            Ok(())
        } else {
            Err(EnergyError::TxPowerOutOfRange { p_w: p_tx_w, p_max_w: self.p_max_w })
        }
    }

    /// `f(P_tx)`, per transceiver chain and antenna.
    pub fn load_dependent_power_w(&self, p_tx_w: f64) -> Result<f64, EnergyError> {
        self.check(p_tx_w)?;
        let p = &self.params;
        let pa_in = p_tx_w / (p.eta_pa * (1.0 - p.sigma_feed));
        Ok((pa_in + p.p_rf_w + p.p_bb_w) / p.loss_denominator())
    }

    pub fn bs_power_w(&self, p_tx_w: f64) -> Result<f64, EnergyError> {
        let f = self.load_dependent_power_w(p_tx_w)?;
        let p = &self.params;
        Ok((p.n_trx * p.n_ant) as f64 * (p.p0_w + f))
    }

    /// Consumption of a sleeping BS.
    pub fn sleep_power_w(&self) -> f64 {
        match self.params.deep_sleep_w {
            Some(w) => w,
            None => self.bs_power_w(0.0).expect("0 W is always in range"),
        }
    }

    /// Consumption for a cell state: `None` means asleep.
    pub fn consumption_w(&self, p_tx_w: Option<f64>) -> Result<f64, EnergyError> {
        match p_tx_w {
            Some(p) => self.bs_power_w(p),
            None => Ok(self.sleep_power_w()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model() -> PowerModel {
        PowerModel::new(PowerModelParams::default(), 20.0).unwrap()
    }

    const BS_POWER_AT_20W: f64 = 2135.250_872_935_76;
    const BS_POWER_AT_0W: f64 = 1116.600_336_600_336;

    // Independent evaluation with the table values typed in directly.
    fn f_oracle(p_tx: f64) -> f64 {
        (p_tx / (0.311 * 0.5) + 12.9 + 29.6) / (0.925 * 0.91 * 0.90)
    }

    #[test]
    fn load_dependent_points() {
        let m = model();
        assert!((m.load_dependent_power_w(0.0).unwrap() - 56.100_056_100_056).abs() < 1e-9);
        assert!((m.load_dependent_power_w(20.0).unwrap() - 225.875_145_489_293).abs() < 1e-9);
        for p in [0.0, 1.0, 5.0, 20.0] {
            assert!((m.load_dependent_power_w(p).unwrap() - f_oracle(p)).abs() < 1e-9);
        }
    }

    #[test]
    fn bs_power_points() {
        let m = model();
        assert!((m.bs_power_w(20.0).unwrap() - BS_POWER_AT_20W).abs() < 1e-9);
        assert!((m.bs_power_w(0.0).unwrap() - BS_POWER_AT_0W).abs() < 1e-9);
        assert!((m.bs_power_w(20.0).unwrap() - 6.0 * (130.0 + f_oracle(20.0))).abs() < 1e-9);
    }

    #[test]
    fn slope_matches_derivative() {
        let per_chain = model().params().slope() / 6.0;
        assert!((per_chain - 8.488_754_469_461_86).abs() < 1e-12);
        let m = model();
        let h = 1e-3;
        let fd = (m.load_dependent_power_w(10.0 + h).unwrap() - m.load_dependent_power_w(10.0 - h).unwrap())
            / (2.0 * h);
        assert!((fd - per_chain).abs() < 1e-9);
    }

    #[test]
    fn affine_by_three_point_collinearity() {
        let m = model();
        let (a, b, c) = (0.0, 7.3, 20.0);
        let (pa, pb, pc) = (m.bs_power_w(a).unwrap(), m.bs_power_w(b).unwrap(), m.bs_power_w(c).unwrap());
        let predicted = pa + (pc - pa) * (b - a) / (c - a);
        assert!(((pb - predicted) / pb).abs() < 1e-9);
        assert!(pa < pb && pb < pc);
    }

    #[test]
    fn static_floor_and_share() {
        let m = model();
        for p in [0.0, 0.5, 10.0, 20.0] {
            assert!(m.bs_power_w(p).unwrap() >= 6.0 * 130.0);
        }
        let share = m.bs_power_w(0.0).unwrap() / m.bs_power_w(20.0).unwrap();
        assert!((share - 0.523).abs() < 0.005, "{share}");
    }

    #[test]
    fn doubling_trx_doubles_power() {
        let p = PowerModelParams { n_trx: 12, ..Default::default() };
        let m2 = PowerModel::new(p, 20.0).unwrap();
        assert!((m2.bs_power_w(13.0).unwrap() - 2.0 * model().bs_power_w(13.0).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn sleep_consumption() {
        let m = model();
        assert_eq!(m.sleep_power_w(), m.bs_power_w(0.0).unwrap());
        let delta = m.bs_power_w(20.0).unwrap() - m.sleep_power_w();
        assert!((delta - (BS_POWER_AT_20W - BS_POWER_AT_0W)).abs() < 1e-9);
        let deep = PowerModel::new(PowerModelParams { deep_sleep_w: Some(150.0), ..Default::default() }, 20.0).unwrap();
        assert_eq!(deep.consumption_w(None).unwrap(), 150.0);
    }

    #[test]
    fn range_errors() {
        let m = model();
        assert!(matches!(m.bs_power_w(-0.1), Err(EnergyError::TxPowerOutOfRange { .. })));
        assert!(matches!(m.load_dependent_power_w(20.01), Err(EnergyError::TxPowerOutOfRange { .. })));
        let wide = PowerModel::new(PowerModelParams::default(), 40.0).unwrap();
        assert!(wide.bs_power_w(30.0).is_ok());
    }

    #[test]
    fn invalid_params() {
        for p in [
            PowerModelParams { eta_pa: 0.0, ..Default::default() },
            PowerModelParams { eta_pa: 1.2, ..Default::default() },
            PowerModelParams { sigma_feed: 1.0, ..Default::default() },
            PowerModelParams { n_trx: 0, ..Default::default() },
            PowerModelParams { p0_w: -1.0, ..Default::default() },
        ] {
            assert!(PowerModel::new(p, 20.0).is_err());
        }
    }
}
