//! Reproducibility record embedded in every report.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Everything that determines a run's verdicts. Equal manifests give
/// byte-identical reports.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    /// Arguments after the program name.
    pub command_line: Vec<String>,
    /// Input path to the SHA-256 of its bytes, config file included.
    pub inputs: BTreeMap<String, String>,
    pub seeds: BTreeMap<String, u64>,
    pub horizons: BTreeMap<String, u64>,
    /// Numerical thresholds, rendered exactly as used.
    pub tolerances: BTreeMap<String, String>,
}

impl RunManifest {
    pub fn new(command_line: Vec<String>) -> Self {
        RunManifest {
            tool: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command_line,
            ..Default::default()
        }
    }

    pub fn input(&mut self, path: impl Into<String>, hash: String) {
        self.inputs.insert(path.into(), hash);
    }

    pub fn seed(&mut self, name: &str, seed: u64) {
        self.seeds.insert(name.into(), seed);
    }

    pub fn horizon(&mut self, name: &str, n: u64) {
        self.horizons.insert(name.into(), n);
    }

    pub fn tolerance(&mut self, name: &str, value: impl ToString) {
        self.tolerances.insert(name.into(), value.to_string());
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sha256_of_abc() {
        assert_eq!(sha256_hex(b"abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    }
}
