//! Output stamping and serialization shared by all subcommands.
//!
//! Every artifact embeds the configuration hash, the library version, and
//! the seed, so a result file can always be traced back to the exact run
//! that produced it. Nothing here reads clocks: identical inputs give
//! byte-identical files.

use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Hex SHA-256 of the raw configuration text.
pub fn config_hash(raw: &str) -> String {
    let mut h = Sha256::new();
    h.update(raw.as_bytes());
    let out = h.finalize();
    let mut s = String::with_capacity(64);
    for b in out {
        s.push_str(&format!("{b:02x}"));
    }
    s
}

/// Provenance header attached to every artifact.
#[derive(Clone, Debug, Serialize)]
pub struct RunStamp {
    pub config_hash: String,
    pub version: String,
    pub seed: Option<u64>,
}

impl RunStamp {
    pub fn new(config_hash: String, seed: Option<u64>) -> Self {
        Self {
            config_hash,
            version: VERSION.to_string(),
            seed,
        }
    }

    /// Comment line for the top of CSV artifacts.
    pub fn csv_comment(&self) -> String {
        match self.seed {
            Some(s) => format!(
                "# config_hash={} version={} seed={s}",
                self.config_hash, self.version
            ),
            None => format!(
                "# config_hash={} version={}",
                self.config_hash, self.version
            ),
        }
    }

    /// Wraps a report for JSON output under the stamp.
    pub fn wrap<T: Serialize>(&self, report: &T) -> Result<serde_json::Value> {
        Ok(serde_json::json!({
            "config_hash": self.config_hash,
            "version": self.version,
            "seed": self.seed,
            "report": serde_json::to_value(report)?,
        }))
    }
}

/// Pretty-prints JSON to a file with a trailing newline. Map keys come out
/// sorted because `serde_json::Map` is ordered.
pub fn write_json(path: &Path, value: &serde_json::Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_text(path, &text)
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)
            .with_context(|| format!("cannot create {}", parent.display()))?;
    }
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hash_is_stable_and_hex() {
        let h = config_hash("{}");
        assert_eq!(h.len(), 64);
        assert_eq!(h, config_hash("{}"));
        assert_ne!(h, config_hash("{} "));
        assert!(h.chars().all(|c| c.is_ascii_hexdigit()));
    }

    #[test]
    fn stamp_comment_mentions_all_fields() {
        let s = RunStamp::new("abc".into(), Some(7));
        let line = s.csv_comment();
        assert!(line.starts_with('#'));
        assert!(line.contains("config_hash=abc"));
        assert!(line.contains("seed=7"));
        assert!(line.contains(VERSION));
    }
}
