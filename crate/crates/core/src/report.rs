//! Result files: one JSON object per line, the first being a header that
//! records the run configuration and its SHA-256 hash.

use std::fs;
use std::io;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

pub const FORMAT: &str = "squeeze-kit/1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Header {
    pub format: String,
    pub version: String,
    pub command: String,
    pub config: Value,
    pub config_hash: String,
    /// Seconds since the Unix epoch; absent in deterministic runs.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub timestamp: Option<u64>,
}

/// Hex SHA-256 of the compact JSON form of `config`. Object keys are
/// emitted in sorted order, so equal configurations hash equally.
pub fn config_hash(config: &Value) -> String {
    let text = serde_json::to_string(config).expect("JSON values always serialize");
    hex::encode(Sha256::digest(text.as_bytes()))
}

impl Header {
    pub fn new(command: &str, config: Value, deterministic: bool) -> Self {
        let timestamp = if deterministic {
            None
        } else {
            SystemTime::now().duration_since(UNIX_EPOCH).ok().map(|d| d.as_secs())
        };
        Header {
            format: FORMAT.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            config_hash: config_hash(&config),
            config,
            timestamp,
        }
    }
}

/// Header line followed by one line per record, each carrying the hash.
pub fn render(header: &Header, records: &[Value]) -> String {
    let mut out = serde_json::to_string(&serde_json::json!({ "header": header })).expect("header serializes");
    out.push('\n');
    for r in records {
        let line = serde_json::json!({ "config_hash": header.config_hash, "record": r });
        out.push_str(&serde_json::to_string(&line).expect("records serialize"));
        out.push('\n');
    }
    out
}

pub fn write(path: &Path, header: &Header, records: &[Value]) -> io::Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, render(header, records))
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum VerifyError {
    #[error("file is empty")]
    Empty,
    #[error("line {0}: {1}")]
    Malformed(usize, String),
    #[error("config hash mismatch: recorded {recorded}, recomputed {recomputed}")]
    HashMismatch { recorded: String, recomputed: String },
    #[error("line {0}: record hash differs from the header")]
    RecordHash(usize),
}

/// Recompute the header hash and check every record line against it.
pub fn verify_text(text: &str) -> Result<Header, VerifyError> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, first) = lines.next().ok_or(VerifyError::Empty)?;
    let v: Value = serde_json::from_str(first).map_err(|e| VerifyError::Malformed(1, e.to_string()))?;
    let header: Header = serde_json::from_value(v.get("header").cloned().unwrap_or(Value::Null))
        .map_err(|e| VerifyError::Malformed(1, e.to_string()))?;
    let recomputed = config_hash(&header.config);
    if recomputed != header.config_hash {
        return Err(VerifyError::HashMismatch { recorded: header.config_hash, recomputed });
    }
    for (i, line) in lines {
        let v: Value = serde_json::from_str(line).map_err(|e| VerifyError::Malformed(i + 1, e.to_string()))?;
        if v.get("config_hash").and_then(Value::as_str) != Some(header.config_hash.as_str()) {
            return Err(VerifyError::RecordHash(i + 1));
        }
    }
    Ok(header)
}
