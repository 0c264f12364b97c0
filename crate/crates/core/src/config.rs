//! Simulation configuration file (TOML) and `key=value` overrides.
//!
//! Every section and field is optional; omitted values take the defaults
//! shown by `txopsim config` (which prints the fully resolved file).

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::deployment::ScenarioConfig;
use crate::error::{Error, Result};
use crate::mode::{Mode, PowerPolicy};
use crate::phy::{LinkModel, McsTable, TimingConstants, DEFAULT_MCS_THRESHOLDS_DB};
use crate::propagation::{check_power_levels, thermal_noise_dbm, PathLossParams};
use crate::scheduler::DEFAULT_ORACLE_MAX_STAS;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RadioConfig {
    pub path_loss: PathLossParams,
    /// Strictly ascending; the last entry is the maximum (fixed) power.
    pub tx_power_levels_dbm: Vec<f64>,
    pub noise_floor_dbm: f64,
    /// Recorded for completeness. Coordinated slots are protected by the
    /// MAP-RTS/MAP-CTS reservation and nc-MAP assumes a single contention
    /// domain, so no decision depends on it.
    pub cca_threshold_dbm: f64,
}

impl Default for RadioConfig {
    fn default() -> Self {
        RadioConfig {
            path_loss: PathLossParams::default(),
            tx_power_levels_dbm: vec![11.0, 14.0, 17.0, 20.0, 23.0],
            noise_floor_dbm: thermal_noise_dbm(80e6, 7.0),
            cca_threshold_dbm: -82.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PhyConfig {
    /// Minimum SINR in dB for MCS 0..=10.
    pub mcs_thresholds_db: Vec<f64>,
}

impl Default for PhyConfig {
    fn default() -> Self {
        PhyConfig {
            mcs_thresholds_db: DEFAULT_MCS_THRESHOLDS_DB.to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub num_deployments: usize,
    /// One sweep curve per AP count; `scenario.stas_per_ap` stations each.
    pub ap_counts: Vec<usize>,
    pub power_policies: Vec<PowerPolicy>,
    pub modes: Vec<Mode>,
    pub base_seed: u64,
    /// Worker threads; 0 uses every available core.
    pub workers: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            num_deployments: 10_000,
            ap_counts: vec![2, 3, 4],
            power_policies: vec![PowerPolicy::Variable, PowerPolicy::Fixed],
            modes: Mode::ALL.to_vec(),
            base_seed: 1,
            workers: 0,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.num_deployments == 0 {
            return Err(Error::Config("num_deployments must be at least 1".into()));
        }
        if self.ap_counts.is_empty() || self.ap_counts.contains(&0) {
            return Err(Error::Config(
                "ap_counts must list positive AP counts".into(),
            ));
        }
        if self.power_policies.is_empty() {
            return Err(Error::Config("power_policies must not be empty".into()));
        }
        if self.modes.is_empty() {
            return Err(Error::Config("modes must not be empty".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OracleConfig {
    pub max_stas: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            max_stas: DEFAULT_ORACLE_MAX_STAS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    pub scenario: ScenarioConfig,
    pub radio: RadioConfig,
    pub phy: PhyConfig,
    pub timing: TimingConstants,
    pub experiment: ExperimentConfig,
    pub oracle: OracleConfig,
}

impl SimConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: SimConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("configuration always serializes")
    }

    pub fn validate(&self) -> Result<()> {
        self.scenario.validate()?;
        self.radio.path_loss.validate()?;
        check_power_levels(&self.radio.tx_power_levels_dbm)?;
        self.timing.validate()?;
        self.experiment.validate()?;
        self.link_model()?;
        Ok(())
    }

    pub fn link_model(&self) -> Result<LinkModel> {
        let table = McsTable::with_thresholds(&self.phy.mcs_thresholds_db)?;
        LinkModel::new(table, self.timing.clone(), self.radio.noise_floor_dbm)
    }

    /// Applies one `dotted.key=value` override. The value is parsed as a TOML
    /// value (`4`, `[2, 3]`, `"fixed"`); anything that does not parse is taken
    /// as a bare string.
    pub fn apply_override(&mut self, assignment: &str) -> Result<()> {
        let (key, raw) = assignment
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("override `{assignment}` is not key=value")))?;
        let key = key.trim();
        let raw = raw.trim();
        let value = parse_value(raw);

        let mut root = toml::Table::try_from(&*self)
            .map_err(|e| Error::Config(format!("cannot serialize configuration: {e}")))?;
        let mut path: Vec<&str> = key.split('.').collect();
        let leaf = path
            .pop()
            .filter(|l| !l.is_empty())
            .ok_or_else(|| Error::Config(format!("override `{assignment}` has an empty key")))?;
        let mut table = &mut root;
        for part in &path {
            table = match table.get_mut(*part) {
                Some(toml::Value::Table(t)) => t,
                _ => {
                    return Err(Error::Config(format!(
                        "unknown configuration section `{part}` in `{key}`"
                    )))
                }
            };
        }
        let slot = table
            .get_mut(leaf)
            .ok_or_else(|| Error::Config(format!("unknown configuration key `{key}`")))?;
        *slot = coerce(value, slot);

        let updated: SimConfig = root
            .try_into()
            .map_err(|e| Error::Config(format!("override `{assignment}`: {e}")))?;
        updated.validate()?;
        *self = updated;
        Ok(())
    }

    pub fn apply_overrides<'a>(
        &mut self,
        overrides: impl IntoIterator<Item = &'a str>,
    ) -> Result<()> {
        for o in overrides {
            self.apply_override(o)?;
        }
        Ok(())
    }
}

fn parse_value(raw: &str) -> toml::Value {
    let doc = format!("v = {raw}");
    match toml::from_str::<toml::Table>(&doc) {
        Ok(mut t) => t.remove("v").expect("parsed table has key v"),
        Err(_) => toml::Value::String(raw.to_owned()),
    }
}

/// Integers written for float fields (`noise_floor_dbm=-90`) become floats.
fn coerce(value: toml::Value, current: &toml::Value) -> toml::Value {
    match (value, current) {
        (toml::Value::Integer(i), toml::Value::Float(_)) => toml::Value::Float(i as f64),
        (toml::Value::Array(items), toml::Value::Array(existing))
            if existing.first().is_some_and(|v| v.is_float()) =>
        {
            toml::Value::Array(
                items
                    .into_iter()
                    .map(|v| match v {
                        toml::Value::Integer(i) => toml::Value::Float(i as f64),
                        other => other,
                    })
                    .collect(),
            )
        }
        (v, _) => v,
    }
}
