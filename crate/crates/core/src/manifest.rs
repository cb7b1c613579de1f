//! Run manifests: every persisted census embeds the command line, the
//! solver configuration, timestamps and a content hash so that runs are
//! reproducible and tampering is detectable.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::solver::SectorCensus;

#[derive(Debug, Error)]
pub enum ManifestError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed census document: {0}")]
    Json(#[from] serde_json::Error),
    #[error("content hash mismatch: manifest {expected} vs computed {computed}")]
    HashMismatch { expected: String, computed: String },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub created_utc: String,
    pub artifact_version: String,
    /// SHA-256 over the canonical JSON of the embedded census.
    pub content_hash: String,
}

/// Census document: manifest plus payload.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CensusDocument {
    pub manifest: RunManifest,
    pub census: SectorCensus,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(bytes);
    hex::encode(h.finalize())
}

fn census_hash(census: &SectorCensus) -> Result<String, ManifestError> {
    Ok(sha256_hex(serde_json::to_string(census)?.as_bytes()))
}

impl CensusDocument {
    pub fn new(census: SectorCensus, command: String) -> Result<Self, ManifestError> {
        let content_hash = census_hash(&census)?;
        Ok(CensusDocument {
            manifest: RunManifest {
                command,
                created_utc: chrono::Utc::now().to_rfc3339(),
                artifact_version: env!("CARGO_PKG_VERSION").to_string(),
                content_hash,
            },
            census,
        })
    }

    pub fn save(&self, path: &std::path::Path) -> Result<(), ManifestError> {
        let json = serde_json::to_string_pretty(self)?;
        std::fs::write(path, json)?;
        Ok(())
    }

    /// Load and verify the content hash.
    pub fn load(path: &std::path::Path) -> Result<Self, ManifestError> {
        let text = std::fs::read_to_string(path)?;
        let doc: CensusDocument = serde_json::from_str(&text)?;
        let computed = census_hash(&doc.census)?;
        if computed != doc.manifest.content_hash {
            return Err(ManifestError::HashMismatch {
                expected: doc.manifest.content_hash.clone(),
                computed,
            });
        }
        Ok(doc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::{solve_sector, SolverConfig};

    #[test]
    fn roundtrip_and_tamper_detection() {
        let census = solve_sector(2, 1, &SolverConfig::default(), None);
        let doc = CensusDocument::new(census, "solve --n 2 --ell 1".into()).unwrap();
        let dir = std::env::temp_dir().join(format!("bethe-rc-test-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("census.json");
        doc.save(&path).unwrap();
        let loaded = CensusDocument::load(&path).unwrap();
        assert_eq!(loaded.census.solutions.len(), 1);

        // tamper with the payload
        let mut text = std::fs::read_to_string(&path).unwrap();
        text = text.replace("\"ell\": 1", "\"ell\": 2");
        std::fs::write(&path, text).unwrap();
        assert!(matches!(
            CensusDocument::load(&path),
            Err(ManifestError::HashMismatch { .. }) | Err(ManifestError::Json(_))
        ));
        std::fs::remove_dir_all(&dir).ok();
    }
}
