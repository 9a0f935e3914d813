//! Output manifest: every artifact with its size and content hash, plus
//! the canonical config hash.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Debug, Serialize)]
struct ArtifactEntry {
    path: String,
    bytes: u64,
    sha256: String,
}

#[derive(Debug, Serialize)]
struct Manifest<'a> {
    kind: &'a str,
    seed: u64,
    config_hash: String,
    artifacts: Vec<ArtifactEntry>,
}

pub fn sha256_hex(data: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(data);
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// Writes `manifest.json` listing the given artifacts (paths relative to
/// the output directory, sorted).
pub fn write_manifest(
    out_dir: &Path,
    kind: &str,
    seed: u64,
    canonical_config: &str,
    artifacts: &[PathBuf],
) -> std::io::Result<PathBuf> {
    let mut entries = Vec::new();
    for path in artifacts {
        let data = fs::read(path)?;
        let rel = path.strip_prefix(out_dir).unwrap_or(path);
        entries.push(ArtifactEntry {
            path: rel.to_string_lossy().into_owned(),
            bytes: data.len() as u64,
            sha256: sha256_hex(&data),
        });
    }
    entries.sort_by(|a, b| a.path.cmp(&b.path));
    let manifest = Manifest {
        kind,
        seed,
        config_hash: sha256_hex(canonical_config.as_bytes()),
        artifacts: entries,
    };
    let path = out_dir.join("manifest.json");
    fs::write(&path, serde_json::to_string_pretty(&manifest)?)?;
    Ok(path)
}
