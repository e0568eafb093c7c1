//! Run manifests: every output file carries the subcommand, full parameter
//! set, seed and tool version that produced it, so any artifact can be
//! regenerated from its own header.

use std::collections::BTreeMap;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub parameters: BTreeMap<String, serde_json::Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub version: String,
    pub timestamp_unix_ms: u64,
}

impl RunManifest {
    pub fn new(subcommand: &str) -> Self {
        let timestamp_unix_ms = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_millis() as u64)
            .unwrap_or(0);
        Self {
            subcommand: subcommand.to_string(),
            parameters: BTreeMap::new(),
            seed: None,
            version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp_unix_ms,
        }
    }

    pub fn param(mut self, key: &str, value: impl Serialize) -> Self {
        let encoded = serde_json::to_value(value).expect("manifest parameters are plain data");
        self.parameters.insert(key.to_string(), encoded);
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    /// Single-line JSON, suitable for a CSV comment header.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("manifest serializes")
    }
}
