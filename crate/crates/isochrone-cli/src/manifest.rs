//! Run manifests and output plumbing.
//!
//! Reruns with identical parameters must be byte-identical, so manifests
//! carry no timestamps or host information. JSON outputs embed theirs;
//! CSV outputs get a sibling `<name>.manifest.json`.

use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;

use anyhow::{Context, Result};
use serde::Serialize;

#[derive(Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    pub params: BTreeMap<String, String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl RunManifest {
    pub fn new(
        command: &str,
        family: Option<&str>,
        params: BTreeMap<String, String>,
        seed: Option<u64>,
    ) -> Self {
        Self {
            tool: "isochrone",
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            family: family.map(str::to_string),
            params,
            seed,
        }
    }
}

/// Either a file or stdout.
pub struct OutputSink {
    path: Option<PathBuf>,
}

impl OutputSink {
    pub fn new(path: Option<PathBuf>) -> Result<Self> {
        Ok(Self { path })
    }

    /// Write verbatim text (JSON bodies embed their manifest already).
    pub fn write_text(&self, content: &str) -> Result<()> {
        let content = if content.ends_with('\n') {
            content.to_string()
        } else {
            format!("{content}\n")
        };
        match &self.path {
            Some(path) => {
                fs::write(path, &content).with_context(|| format!("writing {}", path.display()))?;
            }
            None => print!("{content}"),
        }
        Ok(())
    }

    /// Write CSV; when writing to a file, drop the manifest next to it
    /// (the fixed CSV header leaves no room to embed it).
    pub fn write_csv(&self, content: &str, manifest: &RunManifest) -> Result<()> {
        match &self.path {
            Some(path) => {
                fs::write(path, content).with_context(|| format!("writing {}", path.display()))?;
                let mut sidecar = path.as_os_str().to_owned();
                sidecar.push(".manifest.json");
                let sidecar = PathBuf::from(sidecar);
                let body = serde_json::to_string_pretty(manifest)?;
                fs::write(&sidecar, body)
                    .with_context(|| format!("writing {}", sidecar.display()))?;
            }
            None => print!("{content}"),
        }
        Ok(())
    }
}
