//! Run configuration document and the validated simulation context.
//!
//! The config file is one JSON object with optional sections `network`,
//! `energy`, `link` and `run`. Omitted keys take their defaults; unknown keys
//! are rejected.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::energy::{EnergyError, PowerModel, PowerModelParams};
use crate::metrics::EmptyCellRule;
use crate::radio::{
    CqiMcsMap, LinkBudget, LinkTables, PathlossModel, RadioError, DEFAULT_CQI_CSV, DEFAULT_MCS_CSV,
    MCS_256QAM_CSV,
};
use crate::topology::{build_hex_grid, default_region, NetworkConfig, Region, SitePlan, TopologyError};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Missing { path: PathBuf, source: std::io::Error },
    #[error("config schema violation: {0}")]
    Schema(String),
    #[error("missing table file: {0}")]
    MissingTable(String),
    #[error(transparent)]
    Checksum(RadioError),
    #[error("invalid config: {0}")]
    Invalid(String),
}

impl From<TopologyError> for ConfigError {
    fn from(e: TopologyError) -> Self {
        ConfigError::Invalid(e.to_string())
    }
}

impl From<EnergyError> for ConfigError {
    fn from(e: EnergyError) -> Self {
        ConfigError::Invalid(e.to_string())
    }
}

impl From<RadioError> for ConfigError {
    fn from(e: RadioError) -> Self {
        match e {
            RadioError::Checksum { .. } => ConfigError::Checksum(e),
            RadioError::TableFile(..) => ConfigError::MissingTable(e.to_string()),
            other => ConfigError::Invalid(other.to_string()),
        }
    }
}

/// External table file pinned by its SHA-256 digest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableFile {
    pub path: PathBuf,
    pub sha256: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BuiltinMcsTable {
    #[default]
    Qam64,
    Qam256,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LinkConfig {
    pub g_mimo_db: f64,
    pub g_ant_db: f64,
    pub noise_figure_db: f64,
    pub thermal_noise_density_dbm_hz: f64,
    pub pathloss: PathlossModel,
    pub cqi_mcs_map: CqiMcsMap,
    pub mcs_builtin: BuiltinMcsTable,
    pub cqi_table: Option<TableFile>,
    pub mcs_table: Option<TableFile>,
}

impl Default for LinkConfig {
    fn default() -> Self {
        let b = LinkBudget::default();
        Self {
            g_mimo_db: b.g_mimo_db,
            g_ant_db: b.g_ant_db,
            noise_figure_db: b.noise_figure_db,
            thermal_noise_density_dbm_hz: b.thermal_noise_density_dbm_hz,
            pathloss: PathlossModel::default(),
            cqi_mcs_map: CqiMcsMap::default(),
            mcs_builtin: BuiltinMcsTable::default(),
            cqi_table: None,
            mcs_table: None,
        }
    }
}

impl LinkConfig {
    pub fn budget(&self) -> LinkBudget {
        LinkBudget {
            g_mimo_db: self.g_mimo_db,
            g_ant_db: self.g_ant_db,
            noise_figure_db: self.noise_figure_db,
            thermal_noise_density_dbm_hz: self.thermal_noise_density_dbm_hz,
        }
    }

    /// Table paths are resolved relative to `base_dir`.
    pub fn load_tables(&self, base_dir: &Path) -> Result<LinkTables, RadioError> {
        let read = |t: &TableFile| -> Result<String, RadioError> {
            let path = base_dir.join(&t.path);
            let bytes = std::fs::read(&path)
                .map_err(|e| RadioError::TableFile(path.display().to_string(), e.to_string()))?;
            let got = crate::radio::sha256_hex(&bytes);
            if !got.eq_ignore_ascii_case(&t.sha256) {
                return Err(RadioError::Checksum {
                    path: path.display().to_string(),
                    expected: t.sha256.clone(),
                    actual: got,
                });
            }
            String::from_utf8(bytes).map_err(|e| RadioError::Table(e.to_string()))
        };
        let cqi = match &self.cqi_table {
            Some(t) => read(t)?,
            None => DEFAULT_CQI_CSV.to_string(),
        };
        let mcs = match (&self.mcs_table, self.mcs_builtin) {
            (Some(t), _) => read(t)?,
            (None, BuiltinMcsTable::Qam64) => DEFAULT_MCS_CSV.to_string(),
            (None, BuiltinMcsTable::Qam256) => MCS_256QAM_CSV.to_string(),
        };
        LinkTables::from_csv(&cqi, &mcs, self.cqi_mcs_map)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunSection {
    /// Run duration τ, s.
    pub tau_s: f64,
    pub interval_s: f64,
    pub hysteresis_db: f64,
    /// Divide B equally among a cell's attached UEs.
    pub share_bandwidth: bool,
    pub empty_cell_mean: EmptyCellRule,
    /// Place exactly this many UEs instead of a Poisson count.
    pub fixed_ue_count: Option<usize>,
    pub output_dir: Option<PathBuf>,
}

impl Default for RunSection {
    fn default() -> Self {
        Self {
            tau_s: 100.0,
            interval_s: 1.0,
            hysteresis_db: 0.0,
            share_bandwidth: false,
            empty_cell_mean: EmptyCellRule::default(),
            fixed_ue_count: None,
            output_dir: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub network: NetworkConfig,
    pub energy: PowerModelParams,
    pub link: LinkConfig,
    pub run: RunSection,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        // An empty file means "all defaults".
        if text.trim().is_empty() {
            return Ok(Self::default());
        }
        serde_json::from_str(text).map_err(|e| ConfigError::Schema(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| ConfigError::Missing { path: path.to_path_buf(), source })?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.network.validate()?;
        self.energy.validate()?;
        let r = &self.run;
        if !(r.interval_s > 0.0 && r.interval_s <= r.tau_s && r.tau_s.is_finite()) {
            return Err(ConfigError::Invalid(format!(
                "need 0 < interval_s <= tau_s, got interval {} tau {}",
                r.interval_s, r.tau_s
            )));
        }
        if !(r.hysteresis_db >= 0.0 && r.hysteresis_db.is_finite()) {
            return Err(ConfigError::Invalid(format!("hysteresis_db = {}", r.hysteresis_db)));
        }
        let l = &self.link;
        for (name, v) in [
            ("g_mimo_db", l.g_mimo_db),
            ("g_ant_db", l.g_ant_db),
            ("noise_figure_db", l.noise_figure_db),
            ("thermal_noise_density_dbm_hz", l.thermal_noise_density_dbm_hz),
            ("building_height_m", l.pathloss.building_height_m),
            ("street_width_m", l.pathloss.street_width_m),
        ] {
            if !v.is_finite() {
                return Err(ConfigError::Invalid(format!("{name} must be finite")));
            }
        }
        if !(l.pathloss.building_height_m > 0.0 && l.pathloss.street_width_m > 0.0) {
            return Err(ConfigError::Invalid("pathloss h and W must be > 0".into()));
        }
        let f = self.network.carrier_freq_hz;
        if !(crate::radio::MIN_FREQ_HZ..=crate::radio::MAX_FREQ_HZ).contains(&f) {
            return Err(ConfigError::Invalid(format!("carrier_freq_hz {f} outside 0.5-6 GHz")));
        }
        Ok(())
    }
}

/// Everything a run needs that does not depend on the seed.
#[derive(Debug, Clone)]
pub struct SimContext {
    pub config: RunConfig,
    pub tables: LinkTables,
    pub power: PowerModel,
    pub plan: SitePlan,
    pub region: Region,
    pub noise_w: f64,
}

impl SimContext {
    pub fn new(config: RunConfig) -> Result<Self, ConfigError> {
        Self::with_base_dir(config, Path::new("."))
    }

    pub fn with_base_dir(config: RunConfig, base_dir: &Path) -> Result<Self, ConfigError> {
        config.validate()?;
        let tables = config.link.load_tables(base_dir)?;
        let power = PowerModel::new(config.energy.clone(), config.network.p_max_w)?;
        let plan = build_hex_grid(&config.network)?;
        let region = default_region(&plan)?;
        let noise_w = config.link.budget().noise_power_w(config.network.bandwidth_hz);
        Ok(Self { config, tables, power, plan, region, noise_w })
    }

    pub fn n_bs(&self) -> u32 {
        self.config.network.n_bs
    }
}
