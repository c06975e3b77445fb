//! Output directory plumbing: checksummed file emission, fixed-precision
//! number formatting, and the run manifest.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use symplyap_core::{CoreError, Result};

use crate::spec::ExperimentSpec;

/// Format a float with 12 significant digits, the precision of every
/// emitted table. Round-trips f64 closely without printing noise digits.
pub fn fmt_f(x: f64) -> String {
    format!("{x:.11e}")
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(bytes);
    let digest = h.finalize();
    let mut out = String::with_capacity(64);
    for b in digest {
        out.push_str(&format!("{b:02x}"));
    }
    out
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FileRecord {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TaskRecord {
    pub name: String,
    pub status: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl TaskRecord {
    pub fn ok(name: impl Into<String>) -> Self {
        Self { name: name.into(), status: "ok".into(), error: None }
    }

    pub fn failed(name: impl Into<String>, err: &CoreError) -> Self {
        Self { name: name.into(), status: "failed".into(), error: Some(err.to_string()) }
    }

    pub fn is_ok(&self) -> bool {
        self.status == "ok"
    }
}

/// An output directory that records a checksum for every file it writes.
pub struct OutDir {
    root: PathBuf,
    files: Vec<FileRecord>,
}

impl OutDir {
    pub fn create(root: &Path) -> Result<Self> {
        fs::create_dir_all(root)?;
        Ok(Self { root: root.to_path_buf(), files: Vec::new() })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn files(&self) -> &[FileRecord] {
        &self.files
    }

    pub fn write_text(&mut self, name: &str, content: &str) -> Result<()> {
        fs::write(self.root.join(name), content)?;
        self.files.push(FileRecord { path: name.to_string(), sha256: sha256_hex(content.as_bytes()) });
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let text = serde_json::to_string_pretty(value)
            .map_err(|e| CoreError::Numeric(format!("serializing {name}: {e}")))?;
        self.write_text(name, &(text + "\n"))
    }
}

/// Everything needed to reproduce and verify a run: the resolved
/// experiment, what happened, and a checksum per emitted file.
#[derive(Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub spec: ExperimentSpec,
    pub wall_clock_seconds: f64,
    pub tasks: Vec<TaskRecord>,
    pub files: Vec<FileRecord>,
}

impl RunManifest {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        serde_json::from_str(&text)
            .map_err(|e| CoreError::Config(format!("manifest {}: {e}", path.display())))
    }
}

/// A simple aligned CSV builder: header once, one formatted row per call.
pub struct Csv {
    text: String,
}

impl Csv {
    pub fn new(header: &str) -> Self {
        Self { text: format!("{header}\n") }
    }

    pub fn row(&mut self, fields: &[String]) {
        self.text.push_str(&fields.join(","));
        self.text.push('\n');
    }

    pub fn finish(self) -> String {
        self.text
    }
}
