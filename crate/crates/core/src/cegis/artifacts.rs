//! Run artifacts: `trace.json`, `certificate.json` and every solver script.
//!
//! Nothing time-dependent is recorded, so identical runs produce identical
//! files.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{CegisError, Counterexample};
use crate::problem::ParamValues;

/// One region's verdict within an iteration.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceRegion {
    pub region: usize,
    pub verdict: String,
    /// Script file name(s) inside the artifact directory.
    pub scripts: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub iteration: usize,
    pub candidate: ParamValues,
    pub regions: Vec<TraceRegion>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Counterexample>,
    /// Learner verdict after this counterexample, when the learner ran.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub learner: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub learner_script: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trace {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub problem: Option<String>,
    pub solver: String,
    pub seed: u64,
    pub max_iter: u32,
    pub window: u32,
    pub asymptotic: bool,
    pub initial_candidate: ParamValues,
    pub entries: Vec<TraceEntry>,
    pub outcome: String,
    pub iterations: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegionProof {
    pub region: usize,
    pub verdict: String,
    pub script_file: String,
    pub script: String,
}

/// Contents of `certificate.json`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateFile {
    pub params: ParamValues,
    pub v: String,
    pub iterations: usize,
    pub regions: Vec<RegionProof>,
    pub trace: Vec<TraceEntry>,
}

/// Output directory for one run.
#[derive(Clone, Debug)]
pub struct ArtifactDir {
    root: PathBuf,
}

impl ArtifactDir {
    pub fn create(root: impl Into<PathBuf>) -> Result<Self, CegisError> {
        let root = root.into();
        std::fs::create_dir_all(&root).map_err(|source| CegisError::Io { path: root.display().to_string(), source })?;
        Ok(ArtifactDir { root })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    pub fn write(&self, name: &str, contents: &str) -> Result<PathBuf, CegisError> {
        let path = self.path(name);
        std::fs::write(&path, contents).map_err(|source| CegisError::Io { path: path.display().to_string(), source })?;
        Ok(path)
    }

    pub fn write_json<T: Serialize>(&self, name: &str, value: &T) -> Result<PathBuf, CegisError> {
        let mut text = serde_json::to_string_pretty(value).expect("artifact serialization cannot fail");
        text.push('\n');
        self.write(name, &text)
    }
}

/// Script name for one region query, e.g. `verify_003_r1.smt2`.
pub(crate) fn region_script_name(tag: &str, region: usize, open: bool) -> String {
    let suffix = if open { "_open" } else { "" };
    format!("{tag}_r{region}{suffix}.smt2")
}

pub(crate) fn iteration_tag(kind: &str, iteration: usize) -> String {
    format!("{kind}_{iteration:03}")
}
