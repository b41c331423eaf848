//! Run manifest: the config echo plus content hashes of every artifact, so a
//! run can be verified byte-for-byte. No timestamps — identical configs must
//! produce identical manifests.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::RunError;

#[derive(Debug, Serialize)]
struct OutputEntry {
    path: String,
    sha256: String,
}

#[derive(Debug, Serialize)]
struct Manifest<'a> {
    command: &'a str,
    config: &'a serde_json::Value,
    config_sha256: String,
    outputs: Vec<OutputEntry>,
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Collects artifacts for one run and writes `manifest.json` at the end.
pub struct RunDir {
    dir: PathBuf,
    outputs: Vec<OutputEntry>,
}

impl RunDir {
    pub fn create(dir: &Path) -> Result<Self, RunError> {
        fs::create_dir_all(dir)
            .map_err(|e| RunError::Io(format!("create {}: {e}", dir.display())))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            outputs: Vec::new(),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// Write one artifact and record its hash.
    pub fn write(&mut self, name: &str, contents: &str) -> Result<(), RunError> {
        let path = self.dir.join(name);
        fs::write(&path, contents)
            .map_err(|e| RunError::Io(format!("write {}: {e}", path.display())))?;
        self.outputs.push(OutputEntry {
            path: name.to_string(),
            sha256: sha256_hex(contents.as_bytes()),
        });
        Ok(())
    }

    /// Write `manifest.json` covering everything recorded so far.
    pub fn finish(self, command: &str, config: &serde_json::Value) -> Result<(), RunError> {
        let config_bytes =
            serde_json::to_vec(config).map_err(|e| RunError::Io(format!("manifest: {e}")))?;
        let manifest = Manifest {
            command,
            config,
            config_sha256: sha256_hex(&config_bytes),
            outputs: self.outputs,
        };
        let text = serde_json::to_string_pretty(&manifest)
            .map_err(|e| RunError::Io(format!("manifest: {e}")))?;
        let path = self.dir.join("manifest.json");
        fs::write(&path, text)
            .map_err(|e| RunError::Io(format!("write {}: {e}", path.display())))
    }
}
