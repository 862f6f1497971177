use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::jobs::{Artifact, Job};
use phasegate::{Error, Result};

pub const MANIFEST_NAME: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputRecord {
    pub path: String,
    pub sha256: String,
    pub bytes: usize,
}

/// Written next to every set of outputs. `subcommand` and `parameters` are the resolved job.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunManifest {
    pub tool_version: String,
    #[serde(flatten)]
    pub job: Job,
    /// SHA-256 of the canonical JSON of the resolved job.
    pub input_digest: String,
    pub seed: Option<u64>,
    pub outputs: Vec<OutputRecord>,
    #[serde(default)]
    pub warnings: Vec<String>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn job_digest(job: &Job) -> String {
    sha256_hex(&serde_json::to_vec(job).expect("serializable job"))
}

impl RunManifest {
    pub fn new(job: &Job, artifacts: &[Artifact], warnings: &[String]) -> Self {
        Self {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            job: job.clone(),
            input_digest: job_digest(job),
            seed: job.seed(),
            outputs: artifacts
                .iter()
                .map(|a| OutputRecord { path: a.name.clone(), sha256: sha256_hex(&a.bytes), bytes: a.bytes.len() })
                .collect(),
            warnings: warnings.to_vec(),
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        let m: RunManifest = serde_json::from_str(&text).map_err(|e| Error::Config(format!("manifest {}: {e}", path.display())))?;
        if job_digest(&m.job) != m.input_digest {
            return Err(Error::Config(format!("manifest {}: parameters do not match input_digest", path.display())));
        }
        Ok(m)
    }
}

/// Write artifacts and the manifest into `dir`, creating it if needed.
pub fn write_outputs(dir: &Path, job: &Job, artifacts: &[Artifact], warnings: &[String]) -> Result<RunManifest> {
    fs::create_dir_all(dir)?;
    for a in artifacts {
        fs::write(dir.join(&a.name), &a.bytes)?;
    }
    let manifest = RunManifest::new(job, artifacts, warnings);
    let mut bytes = serde_json::to_vec_pretty(&manifest).expect("serializable manifest");
    bytes.push(b'\n');
    fs::write(dir.join(MANIFEST_NAME), bytes)?;
    Ok(manifest)
}
