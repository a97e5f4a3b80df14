//! Artifact persistence: write every output file and a `manifest.txt`
//! listing `<name> <sha256>` per line, sorted by name. The manifest hashes
//! content only, so two runs into different directories compare equal iff
//! every artifact byte matches.

use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

pub const MANIFEST_NAME: &str = "manifest.txt";

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// The manifest body for a set of named artifacts.
pub fn manifest_text(files: &[(String, Vec<u8>)]) -> String {
    let mut lines: Vec<String> = files
        .iter()
        .map(|(name, bytes)| format!("{name} {}", sha256_hex(bytes)))
        .collect();
    lines.sort();
    let mut out = lines.join("\n");
    out.push('\n');
    out
}

/// Write all artifacts under `out_dir` (creating subdirectories as needed)
/// plus the manifest; returns the manifest path.
pub fn write_all(out_dir: &Path, files: &[(String, Vec<u8>)]) -> CliResult<PathBuf> {
    let mut seen = std::collections::HashSet::new();
    for (name, _) in files {
        if !seen.insert(name) {
            return Err(CliError::Runtime(format!("duplicate artifact name {name}")));
        }
        if name.starts_with('/') || name.split('/').any(|part| part == "..") {
            return Err(CliError::Runtime(format!("unsafe artifact name {name}")));
        }
    }
    std::fs::create_dir_all(out_dir).map_err(CliError::runtime)?;
    for (name, bytes) in files {
        let path = out_dir.join(name);
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent).map_err(CliError::runtime)?;
        }
        std::fs::write(&path, bytes).map_err(CliError::runtime)?;
    }
    let manifest_path = out_dir.join(MANIFEST_NAME);
    std::fs::write(&manifest_path, manifest_text(files)).map_err(CliError::runtime)?;
    Ok(manifest_path)
}
