//! Run reports: the command output wrapped with provenance and timing.

use popmatch::popularity::EnumerationGuard;
use popmatch::{Matching, PreferenceInstance};
use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

#[derive(Debug, Serialize)]
pub struct GuardSettings {
    pub max_vertices: usize,
    pub max_matchings: usize,
}

impl From<&EnumerationGuard> for GuardSettings {
    fn from(g: &EnumerationGuard) -> Self {
        Self { max_vertices: g.max_vertices, max_matchings: g.max_matchings }
    }
}

#[derive(Debug, Serialize)]
pub struct RunReport {
    pub command: Vec<String>,
    /// `sha256:<hex>` of the instance file bytes.
    pub instance_digest: Option<String>,
    pub output: Value,
    pub exit_code: i32,
    /// Number of reported matchings that were re-parsed and re-validated.
    pub reverified_matchings: usize,
    pub timing_ms: f64,
    pub guard: GuardSettings,
    pub jobs: usize,
}

pub fn digest(bytes: &[u8]) -> String {
    let d = Sha256::digest(bytes);
    let hex: String = d.iter().map(|b| format!("{b:02x}")).collect();
    format!("sha256:{hex}")
}

/// Round-trips each matching through its JSON form against the instance.
pub fn reverify(g: &PreferenceInstance, matchings: &[Matching]) -> Result<usize, String> {
    for m in matchings {
        let back = Matching::from_json(g, &m.to_json(g)).map_err(|e| e.to_string())?;
        if &back != m {
            return Err(format!("matching {} does not survive a round trip", m.describe(g)));
        }
    }
    Ok(matchings.len())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_of_empty_input() {
        assert_eq!(digest(b""), "sha256:e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    }
}
