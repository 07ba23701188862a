//! Helpers shared by the subcommands.

use std::fs;
use std::path::{Path, PathBuf};

use hexwatt::radio::sha256_hex;
use hexwatt::scenario::PowerLevel;
use hexwatt::{RunConfig, Scenario, SimContext};
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::args::{ConfigArg, PowerArgs};
use crate::error::{CliError, Result};

/// Loads and validates the config; table paths resolve next to the file.
pub fn load_context(arg: &ConfigArg) -> Result<SimContext> {
    match &arg.config {
        Some(path) => {
            let config = RunConfig::load(path)?;
            let base = path.parent().unwrap_or(Path::new("."));
            Ok(SimContext::with_base_dir(config, base)?)
        }
        None => Ok(SimContext::new(RunConfig::default())?),
    }
}

pub fn config_digest(config: &RunConfig) -> String {
    let text = serde_json::to_string(config).expect("config serialises");
    sha256_hex(text.as_bytes())
}

pub fn parse_scenario(text: &str, n_bs: u32) -> Result<Scenario> {
    let s: Scenario = text.parse().map_err(|e| CliError::Usage(format!("{e}")))?;
    s.validate(n_bs).map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(s)
}

pub fn power_level(args: &PowerArgs) -> Result<PowerLevel> {
    if args.sleep {
        return Ok(PowerLevel::Sleep);
    }
    if let Some(dbm) = args.power_dbm {
        return Ok(PowerLevel::Dbm(dbm));
    }
    match args.power_watts {
        Some(w) if w > 0.0 && w.is_finite() => Ok(PowerLevel::Dbm(hexwatt::units::w_to_dbm(w))),
        Some(w) => Err(CliError::Usage(format!("--power-watts must be > 0 (got {w}); use --sleep for 0 W"))),
        None => Err(CliError::Usage("one of --power-dbm, --power-watts, --sleep is required".into())),
    }
}

pub fn check_level(level: PowerLevel, ctx: &SimContext) -> Result<()> {
    level
        .resolve_w(ctx.power.p_max_w())
        .map(|_| ())
        .map_err(|e| CliError::Usage(e.to_string()))
}

pub fn output_dir(flag: Option<&PathBuf>, ctx: &SimContext) -> Result<PathBuf> {
    flag.cloned()
        .or_else(|| ctx.config.run.output_dir.clone())
        .ok_or_else(|| CliError::Usage("no output directory: pass --out or set run.output_dir".into()))
}

/// Writes pretty JSON through a temporary file so readers never see a
/// partial document.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    let tmp = path.with_extension("json.tmp");
    fs::write(&tmp, text)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|_| CliError::MissingFile(path.display().to_string()))?;
    serde_json::from_str(&text).map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))
}
