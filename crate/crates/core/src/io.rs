//! Run manifests and image output.

use std::collections::BTreeMap;
use std::io::{self, Write};

use serde::Serialize;
use sha2::{Digest, Sha256};

/// Everything that determines the contents of an output file.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub substitution: String,
    pub kappa: f64,
    /// Command parameters and tolerances, keyed by flag name.
    pub params: BTreeMap<String, serde_json::Value>,
    pub seed: u64,
    pub version: String,
}

impl RunManifest {
    pub fn new(command: &str, substitution: &str, kappa: f64, seed: u64) -> RunManifest {
        RunManifest {
            command: command.to_string(),
            substitution: substitution.to_string(),
            kappa,
            params: BTreeMap::new(),
            seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }

    pub fn param<V: Serialize>(mut self, key: &str, value: V) -> RunManifest {
        self.params.insert(key.to_string(), serde_json::to_value(value).expect("serializable parameter"));
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes")
    }

    /// Hex SHA-256 of the compact JSON form.
    pub fn hash(&self) -> String {
        let compact = serde_json::to_string(self).expect("manifest serializes");
        Sha256::digest(compact.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Comment line placed at the top of every output file.
    pub fn header(&self) -> String {
        format!("manifest-sha256: {}", self.hash())
    }
}

/// Binary 16-bit grayscale PGM (`P5`, maxval 65535, big-endian samples).
/// `rows` are written top to bottom.
pub fn write_pgm16<W: Write>(mut out: W, rows: &[Vec<u16>], comment: &str) -> io::Result<()> {
    let height = rows.len();
    let width = rows.first().map_or(0, |r| r.len());
    if rows.iter().any(|r| r.len() != width) {
        return Err(io::Error::new(io::ErrorKind::InvalidInput, "ragged image rows"));
    }
    write!(out, "P5\n# {comment}\n{width} {height}\n65535\n")?;
    for row in rows {
        for v in row {
            out.write_all(&v.to_be_bytes())?;
        }
    }
    Ok(())
}

/// Linear gray level of `value` on `[0, max]`, clipped.
pub fn gray_level(value: f64, max: f64) -> u16 {
    if !(value > 0.0) {
        return 0;
    }
    ((value / max).min(1.0) * 65535.0).round() as u16
}
