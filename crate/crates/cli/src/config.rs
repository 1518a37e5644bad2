//! Flat JSON configuration files.
//!
//! Keys match the model's field names. Powers may be given in Watts
//! (`p_tx`, `sigma2`) or in dBm (`p_tx_dbm`, `sigma2_dbm`); they are
//! converted once here.

use std::fmt;
use std::path::{Path, PathBuf};

use cellwait::model::dbm_to_watts;
use cellwait::{AccessScenario, ModelError, NetworkConfig, PowerModel};
use serde::Deserialize;

pub const DEFAULT_R_TH: f64 = 10.0;
pub const DEFAULT_W: f64 = 10.0;

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub path: PathBuf,
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(line) => write!(f, "{}:{}: {}", self.path.display(), line, self.message),
            None => write!(f, "{}: {}", self.path.display(), self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(default)]
    note: Option<String>,
    rho_f: f64,
    #[serde(rename = "p_A")]
    p_a: f64,
    #[serde(rename = "p_I")]
    p_i: f64,
    #[serde(rename = "p_S")]
    p_s: f64,
    mu: f64,
    #[serde(rename = "lambda_S")]
    lambda_s: f64,
    alpha: f64,
    p_tx: Option<f64>,
    p_tx_dbm: Option<f64>,
    sigma2: Option<f64>,
    sigma2_dbm: Option<f64>,
    zeta: Option<f64>,
    r_th: Option<f64>,
    w: Option<f64>,
    p_active: Option<f64>,
    p_idle: Option<f64>,
    p_sleep: Option<f64>,
    bandwidth: Option<f64>,
}

/// Everything a command needs from a config file.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedConfig {
    pub network: NetworkConfig,
    pub scenario: AccessScenario,
    pub power: PowerModel,
    pub note: Option<String>,
}

fn key_line(text: &str, key: &str) -> Option<usize> {
    let needle = format!("\"{key}\"");
    text.lines().position(|l| l.contains(&needle)).map(|i| i + 1)
}

fn watts(text: &str, path: &Path, name: &str, w: Option<f64>, dbm: Option<f64>, default: Option<f64>) -> Result<f64, ConfigError> {
    match (w, dbm) {
        (Some(_), Some(_)) => Err(ConfigError {
            path: path.to_path_buf(),
            line: key_line(text, &format!("{name}_dbm")),
            message: format!("give either {name} or {name}_dbm, not both"),
        }),
        (Some(x), None) => Ok(x),
        (None, Some(d)) => Ok(dbm_to_watts(d)),
        (None, None) => default.ok_or_else(|| ConfigError {
            path: path.to_path_buf(),
            line: None,
            message: format!("missing {name} (Watts) or {name}_dbm"),
        }),
    }
}

/// Parse a configuration document; `path` is only used in messages.
pub fn parse_config(text: &str, path: &Path) -> Result<LoadedConfig, ConfigError> {
    let raw: RawConfig = serde_json::from_str(text).map_err(|e| ConfigError {
        path: path.to_path_buf(),
        line: (e.line() > 0).then_some(e.line()),
        message: e.to_string(),
    })?;
    let model_err = |e: ModelError| ConfigError {
        path: path.to_path_buf(),
        line: key_line(text, e.field()),
        message: e.to_string(),
    };
    let p_tx = watts(text, path, "p_tx", raw.p_tx, raw.p_tx_dbm, None)?;
    let sigma2 = watts(text, path, "sigma2", raw.sigma2, raw.sigma2_dbm, Some(0.0))?;
    let network = NetworkConfig::new(
        raw.rho_f,
        raw.p_a,
        raw.p_i,
        raw.p_s,
        raw.mu,
        raw.lambda_s,
        raw.alpha,
        p_tx,
        sigma2,
        raw.zeta.unwrap_or(1.0),
    )
    .map_err(model_err)?;
    let scenario = AccessScenario::new(raw.r_th.unwrap_or(DEFAULT_R_TH), raw.w.unwrap_or(DEFAULT_W)).map_err(model_err)?;
    let base = PowerModel::pico_default();
    let power = PowerModel::new(
        raw.p_active.unwrap_or(base.p_active()),
        raw.p_idle.unwrap_or(base.p_idle()),
        raw.p_sleep.unwrap_or(base.p_sleep()),
        raw.bandwidth.unwrap_or(base.bandwidth()),
    )
    .map_err(model_err)?;
    Ok(LoadedConfig {
        network,
        scenario,
        power,
        note: raw.note,
    })
}

pub fn load_config(path: &Path) -> Result<LoadedConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError {
        path: path.to_path_buf(),
        line: None,
        message: format!("cannot read config: {e}"),
    })?;
    parse_config(&text, path)
}
