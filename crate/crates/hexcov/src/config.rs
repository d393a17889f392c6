//! Run configuration: JSON file merged with command-line flags, flags
//! winning. The fully resolved config is echoed into every output so a
//! run can be reproduced from its artifact alone.

use std::path::{Path, PathBuf};

use hexcov_core::netmodel::{LinkMode, MobileMode, SidelobeMode, SimParams};
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Environment variable naming a default config file, used when
/// `--config` is not given.
pub const CONFIG_ENV: &str = "HEXCOV_CONFIG";

/// Model parameters plus the command-level knobs, as they appear both
/// in the JSON config file and in the echoed metadata.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub lambda: f64,
    pub eta: f64,
    pub nu: f64,
    pub alpha: f64,
    pub delta1: f64,
    pub delta2: f64,
    pub delta: f64,
    pub theta: f64,
    #[serde(default)]
    pub m_antennas: Option<u32>,
    pub rings: u32,
    pub link_mode: String,
    pub sidelobe_mode: String,
    pub seed: u64,
    pub mode: String,
    /// `None` means "the single K implied by lambda/eta"; an explicit
    /// empty list is honored as an empty sweep.
    #[serde(default)]
    pub k_values: Option<Vec<f64>>,
    pub n_trials: u64,
    pub x_grid: Vec<f64>,
    pub r: f64,
    pub r_out: f64,
    pub rings_sweep: Vec<u32>,
    #[serde(default)]
    pub threads: Option<usize>,
}

/// Same shape with every field optional: the on-disk layer and the
/// flag layer before merging.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartialConfig {
    pub lambda: Option<f64>,
    pub eta: Option<f64>,
    pub nu: Option<f64>,
    pub alpha: Option<f64>,
    pub delta1: Option<f64>,
    pub delta2: Option<f64>,
    pub delta: Option<f64>,
    pub theta: Option<f64>,
    pub m_antennas: Option<u32>,
    pub rings: Option<u32>,
    pub link_mode: Option<String>,
    pub sidelobe_mode: Option<String>,
    pub seed: Option<u64>,
    pub mode: Option<String>,
    pub k_values: Option<Vec<f64>>,
    pub n_trials: Option<u64>,
    pub x_grid: Option<Vec<f64>>,
    pub r: Option<f64>,
    pub r_out: Option<f64>,
    pub rings_sweep: Option<Vec<u32>>,
    pub threads: Option<usize>,
}

impl PartialConfig {
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Validation(format!("bad config {}: {e}", path.display())))
    }

    /// Overlays `self` (higher precedence) on `base`.
    fn or(self, base: PartialConfig) -> PartialConfig {
        macro_rules! pick {
            ($($f:ident),*) => { PartialConfig { $($f: self.$f.or(base.$f)),* } };
        }
        pick!(
            lambda, eta, nu, alpha, delta1, delta2, delta, theta, m_antennas, rings, link_mode,
            sidelobe_mode, seed, mode, k_values, n_trials, x_grid, r, r_out, rings_sweep, threads
        )
    }
}

/// Resolves flags over file over defaults into a full config.
pub fn resolve(flags: PartialConfig, file: Option<PathBuf>) -> Result<RunConfig, CliError> {
    let from_file = match file.or_else(|| std::env::var_os(CONFIG_ENV).map(PathBuf::from)) {
        Some(path) => PartialConfig::from_file(&path)?,
        None => PartialConfig::default(),
    };
    let c = flags.or(from_file);
    let cfg = RunConfig {
        lambda: c.lambda.unwrap_or(1.0),
        eta: c.eta.unwrap_or(0.1),
        nu: c.nu.unwrap_or(0.25),
        alpha: c.alpha.unwrap_or(4.0),
        delta1: c.delta1.unwrap_or(1.0),
        delta2: c.delta2.unwrap_or(1.0),
        delta: c.delta.unwrap_or(0.1),
        theta: c.theta.unwrap_or(1.0),
        m_antennas: c.m_antennas,
        rings: c.rings.unwrap_or(3),
        link_mode: c.link_mode.unwrap_or_else(|| "rayleigh".into()),
        sidelobe_mode: c.sidelobe_mode.unwrap_or_else(|| "constant".into()),
        seed: c.seed.unwrap_or(42),
        mode: c.mode.unwrap_or_else(|| "center".into()),
        k_values: c.k_values,
        n_trials: c.n_trials.unwrap_or(100_000),
        x_grid: c.x_grid.unwrap_or_default(),
        r: c.r.unwrap_or(1.0),
        r_out: c.r_out.unwrap_or(8.0),
        rings_sweep: c.rings_sweep.unwrap_or_else(|| vec![3, 4]),
        threads: c.threads,
    };
    cfg.params()?; // surface parameter errors before any work starts
    cfg.mobile_mode()?;
    Ok(cfg)
}

impl RunConfig {
    pub fn params(&self) -> Result<SimParams, CliError> {
        let link_mode = match self.link_mode.as_str() {
            "rayleigh" => LinkMode::Rayleigh,
            "exact-cell" => LinkMode::ExactCell,
            other => {
                return Err(CliError::Validation(format!(
                    "link_mode: expected \"rayleigh\" or \"exact-cell\", got \"{other}\""
                )))
            }
        };
        let sidelobe_mode = match self.sidelobe_mode.as_str() {
            "constant" => SidelobeMode::Constant,
            "uniform" => SidelobeMode::Uniform,
            other => {
                return Err(CliError::Validation(format!(
                    "sidelobe_mode: expected \"constant\" or \"uniform\", got \"{other}\""
                )))
            }
        };
        let params = SimParams {
            lambda: self.lambda,
            eta: self.eta,
            nu: self.nu,
            alpha: self.alpha,
            delta1: self.delta1,
            delta2: self.delta2,
            delta: self.delta,
            theta: self.theta,
            m_antennas: self.m_antennas,
            rings: self.rings,
            link_mode,
            sidelobe_mode,
            seed: self.seed,
        };
        params.validate().map_err(|e| CliError::Validation(e.to_string()))?;
        Ok(params)
    }

    pub fn mobile_mode(&self) -> Result<MobileMode, CliError> {
        match self.mode.as_str() {
            "center" => Ok(MobileMode::Center),
            "typical" => Ok(MobileMode::Typical),
            other => Err(CliError::Validation(format!(
                "mode: expected \"center\" or \"typical\", got \"{other}\""
            ))),
        }
    }

    /// K points to use: explicit list, else the single K implied by
    /// `lambda / eta`.
    pub fn k_points(&self) -> Vec<f64> {
        match &self.k_values {
            Some(v) => v.clone(),
            None => vec![self.lambda / self.eta],
        }
    }
}
