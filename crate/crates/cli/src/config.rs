//! Run defaults. Every value can be overridden by a TOML file named in
//! `LINDYN_CONFIG` (or `--config`), and then by per-command flags.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::manifest::sha256_hex;

pub const CONFIG_ENV: &str = "LINDYN_CONFIG";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Defaults {
    /// Checked index window `[-window, window]` for `d_n` and distortion.
    pub window: u64,
    /// Window used by `classify`; larger values only add evidence.
    pub classify_window: u64,
    /// Horizon for hitting statistics.
    pub horizon: u64,
    /// Thresholds tried by `density` when no `--eps` is given.
    pub eps_ladder: Vec<f64>,
    /// Seed for every randomized sweep.
    pub seed: u64,
    /// Random intervals per map in `affine verify-star`.
    pub star_trials: usize,
    /// Exact head terms in `affine sc-witness`.
    pub head_terms: u64,
    /// Target slots for `construct-fhc`.
    pub fhc_slots: u32,
    /// Threshold for the slot densities in `construct-fhc`.
    pub fhc_eps: f64,
    /// Sampled points for the density-set sums in `construct-fhc`.
    pub samples: usize,
    /// Window of the density-set sums in `construct-fhc`.
    pub density_window: u64,
    /// Spacing of CSV rows for density curves.
    pub csv_step: u64,
    /// Largest `n` searched by `odometer returns`.
    pub return_bound: u64,
    /// Horizons for `br-lemma`.
    pub br_horizons: Vec<u64>,
}

impl Default for Defaults {
    fn default() -> Self {
        Defaults {
            window: 1_000,
            classify_window: 64,
            horizon: 100_000,
            eps_ladder: (1..=6).map(|k| 0.5f64.powi(k)).collect(),
            seed: 2024,
            star_trials: 1_000,
            head_terms: 64,
            fhc_slots: 3,
            fhc_eps: 0.1,
            samples: 50,
            density_window: 64,
            csv_step: 100,
            return_bound: 1 << 20,
            br_horizons: vec![1_000, 10_000, 100_000],
        }
    }
}

/// Loaded defaults together with where they came from.
#[derive(Debug, Clone)]
pub struct Config {
    pub defaults: Defaults,
    /// `(path, sha256)` of the file read, if any.
    pub source: Option<(PathBuf, String)>,
}

impl Config {
    /// Reads `explicit`, else the file named by `LINDYN_CONFIG`, else built-in defaults.
    pub fn load(explicit: Option<&Path>) -> Result<Self, CliError> {
        let path = match explicit {
            Some(p) => Some(p.to_path_buf()),
            None => std::env::var_os(CONFIG_ENV).filter(|v| !v.is_empty()).map(PathBuf::from),
        };
        let Some(path) = path else {
            return Ok(Config { defaults: Defaults::default(), source: None });
        };
        let bytes = std::fs::read(&path).map_err(|e| CliError::io(&path, e))?;
        let text = std::str::from_utf8(&bytes)
            .map_err(|e| CliError::Config(format!("{}: not UTF-8: {e}", path.display())))?;
        let defaults: Defaults =
            toml::from_str(text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        defaults.validate()?;
        Ok(Config { defaults, source: Some((path, sha256_hex(&bytes))) })
    }
}

impl Defaults {
    fn validate(&self) -> Result<(), CliError> {
        if self.eps_ladder.iter().any(|e| !(*e > 0.0 && e.is_finite())) {
            return Err(CliError::Config("eps_ladder entries must be positive".into()));
        }
        if !(self.fhc_eps > 0.0 && self.fhc_eps.is_finite()) {
            return Err(CliError::Config("fhc_eps must be positive".into()));
        }
        if self.horizon == 0 || self.csv_step == 0 || self.fhc_slots == 0 {
            return Err(CliError::Config("horizon, csv_step and fhc_slots must be at least 1".into()));
        }
        Ok(())
    }
}
