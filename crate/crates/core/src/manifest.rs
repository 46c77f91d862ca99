//! Run manifests: a machine-readable sidecar describing how an output was
//! produced (command, configuration hash, seed, version, artifacts).

use serde::Serialize;
use std::time::{SystemTime, UNIX_EPOCH};

/// Sidecar metadata written next to every artifact-producing run.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub schema: u32,
    /// Argv echo of the invocation.
    pub command: Vec<String>,
    /// Stable hash of the resolved configuration (field order independent).
    pub config_hash: String,
    /// Seed actually used; auto-generated seeds are recorded here.
    pub seed: Option<u64>,
    pub version: String,
    pub timestamp_unix_s: u64,
    /// Files written by the run.
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn new(
        command: Vec<String>,
        config: &serde_json::Value,
        seed: Option<u64>,
        outputs: Vec<String>,
    ) -> Self {
        RunManifest {
            schema: 1,
            command,
            config_hash: config_hash(config),
            seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp_unix_s: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
            outputs,
        }
    }
}

/// FNV-1a hash of the canonical JSON encoding. `serde_json` maps are
/// BTree-backed, so object keys serialize sorted and the hash does not depend
/// on field insertion order.
pub fn config_hash(config: &serde_json::Value) -> String {
    let canonical = config.to_string();
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in canonical.as_bytes() {
        h ^= *b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    format!("{h:016x}")
}
