//! Run manifests: enough to reproduce every non-timing field of an
//! artifact bit-exactly.

use serde::{Deserialize, Serialize};
use std::time::{SystemTime, UNIX_EPOCH};

pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command_line: String,
    pub config: serde_json::Value,
    pub master_seed: u64,
    pub artifact_version: String,
    pub timestamp_unix: u64,
}

impl RunManifest {
    pub fn new(command_line: String, config: &impl Serialize, master_seed: u64) -> Self {
        RunManifest {
            command_line,
            config: serde_json::to_value(config).expect("config serializes"),
            master_seed,
            artifact_version: ARTIFACT_VERSION.to_string(),
            timestamp_unix: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
        }
    }

    pub fn from_argv() -> String {
        std::env::args().collect::<Vec<_>>().join(" ")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("manifest serializes")
    }
}
