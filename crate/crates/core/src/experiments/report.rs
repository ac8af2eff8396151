//! Verification reports and run manifests.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::error::ExperimentError;
use crate::experiments::config::ExperimentConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionResult {
    pub id: u32,
    pub name: String,
    pub passed: bool,
    pub measured: BTreeMap<String, f64>,
    pub tolerances: BTreeMap<String, f64>,
    /// Explanation of the first failure, empty on success.
    pub detail: String,
}

impl CriterionResult {
    pub fn new(id: u32, name: &str) -> Self {
        Self {
            id,
            name: name.to_string(),
            passed: true,
            measured: BTreeMap::new(),
            tolerances: BTreeMap::new(),
            detail: String::new(),
        }
    }

    pub fn measure(&mut self, key: &str, value: f64) -> &mut Self {
        self.measured.insert(key.to_string(), value);
        self
    }

    pub fn tolerance(&mut self, key: &str, value: f64) -> &mut Self {
        self.tolerances.insert(key.to_string(), value);
        self
    }

    /// Records a failed condition; the first detail is kept.
    pub fn require(&mut self, ok: bool, detail: impl FnOnce() -> String) -> &mut Self {
        if !ok {
            if self.passed {
                self.detail = detail();
            }
            self.passed = false;
        }
        self
    }

    pub fn line(&self) -> String {
        let status = if self.passed { "PASS" } else { "FAIL" };
        let mut s = format!("[{status}] {:>2} {}", self.id, self.name);
        for (k, v) in &self.measured {
            s.push_str(&format!(" {k}={v:.6e}"));
        }
        if !self.passed {
            s.push_str(&format!(" ({})", self.detail));
        }
        s
    }
}

/// Outcome of the verification suite.
///
/// Runtimes are kept out of the serialized body so that the body depends on
/// the configuration and seed only; they are written to the manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub seed: u64,
    pub criteria: Vec<CriterionResult>,
    #[serde(skip)]
    pub runtimes_ms: BTreeMap<u32, f64>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.criteria.iter().all(|c| c.passed)
    }

    pub fn get(&self, id: u32) -> Option<&CriterionResult> {
        self.criteria.iter().find(|c| c.id == id)
    }

    pub fn body_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

/// Index of everything one invocation wrote. The only place timestamps appear.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub mode: String,
    pub seed: u64,
    pub config: ExperimentConfig,
    /// Paths relative to the output directory.
    pub files: Vec<PathBuf>,
    pub complete: bool,
    pub checks_passed: bool,
    pub error: Option<String>,
    pub started_unix_ms: u128,
    pub finished_unix_ms: u128,
    pub runtimes_ms: BTreeMap<String, f64>,
}

pub fn unix_ms() -> u128 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_millis()).unwrap_or(0)
}

/// Output directory with the `runs`, `reports` and `figures` subdirectories.
#[derive(Debug, Clone)]
pub struct OutputDir {
    root: PathBuf,
    files: Vec<PathBuf>,
}

impl OutputDir {
    pub fn create(root: &Path) -> Result<Self, ExperimentError> {
        for sub in ["runs", "reports", "figures"] {
            std::fs::create_dir_all(root.join(sub))?;
        }
        Ok(Self { root: root.to_path_buf(), files: Vec::new() })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    /// Absolute path for `sub/name`, remembered for the manifest.
    pub fn file(&mut self, sub: &str, name: &str) -> PathBuf {
        let rel = Path::new(sub).join(name);
        if !self.files.contains(&rel) {
            self.files.push(rel.clone());
        }
        self.root.join(rel)
    }

    pub fn files(&self) -> &[PathBuf] {
        &self.files
    }

    pub fn write_manifest(&self, manifest: &Manifest) -> Result<PathBuf, ExperimentError> {
        let path = self.root.join("manifest.json");
        let mut text = serde_json::to_string_pretty(manifest)?;
        text.push('\n');
        std::fs::write(&path, text)?;
        Ok(path)
    }
}
