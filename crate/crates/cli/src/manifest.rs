//! Run manifests: the resolved job plus where its output went. No clocks,
//! hostnames or environment are recorded, so equal jobs give equal files.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::jobs::Job;
use crate::{CliError, CliResult};

pub const TOOL: &str = "pqkant";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    #[serde(flatten)]
    pub job: Job,
    pub output: PathBuf,
}

impl RunManifest {
    pub fn new(job: Job, output: PathBuf) -> Self {
        Self { tool: TOOL.into(), version: env!("CARGO_PKG_VERSION").into(), job, output }
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(CliError::io(path))?;
        let manifest: RunManifest = serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("{}: not a run manifest: {e}", path.display())))?;
        if manifest.tool != TOOL {
            return Err(CliError::Usage(format!("{}: manifest is for {:?}", path.display(), manifest.tool)));
        }
        Ok(manifest)
    }
}

/// `<output>.manifest.json`
pub fn manifest_path(output: &Path) -> PathBuf {
    let mut name = output.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}

/// Runs `job`, writes its artifact to `output` with a manifest alongside,
/// and returns the stdout summary.
pub fn execute(job: Job, output: Option<&Path>) -> CliResult<String> {
    let rendered = job.run()?;
    if let Some(out) = output {
        std::fs::write(out, &rendered.artifact).map_err(CliError::io(out))?;
        let manifest = RunManifest::new(job, out.to_path_buf());
        let mut text = serde_json::to_string_pretty(&manifest).expect("manifests serialize");
        text.push('\n');
        let path = manifest_path(out);
        std::fs::write(&path, text).map_err(CliError::io(&path))?;
    }
    Ok(rendered.stdout)
}

/// Re-runs a manifest, writing to `output` or to the recorded path.
pub fn replay(manifest: &Path, output: Option<&Path>) -> CliResult<String> {
    let m = RunManifest::load(manifest)?;
    let out = output.map(Path::to_path_buf).unwrap_or(m.output);
    execute(m.job, Some(&out))
}
