//! Artifact writing and the run manifest.

use std::path::PathBuf;
use std::time::Instant;

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use strip_core::config::RunConfig;

use crate::settings::config_hash;

#[derive(Serialize)]
struct ArtifactEntry {
    file: String,
    sha256: String,
    config_hash: String,
}

pub struct Output {
    dir: PathBuf,
    command: String,
    hash: String,
    config: RunConfig,
    start: Instant,
    artifacts: Vec<ArtifactEntry>,
}

impl Output {
    pub fn new(cfg: &RunConfig, command: &str) -> Result<Self> {
        std::fs::create_dir_all(&cfg.output_dir).with_context(|| format!("creating {}", cfg.output_dir.display()))?;
        Ok(Self {
            dir: cfg.output_dir.clone(),
            command: command.to_string(),
            hash: config_hash(cfg),
            config: cfg.clone(),
            start: Instant::now(),
            artifacts: Vec::new(),
        })
    }

    pub fn write_text(&mut self, name: &str, text: &str) -> Result<()> {
        let path = self.dir.join(name);
        std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        let digest: String = Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect();
        self.artifacts.push(ArtifactEntry { file: name.to_string(), sha256: digest, config_hash: self.hash.clone() });
        Ok(())
    }

    /// Writes `value` with a top-level `config_hash` field added to objects.
    pub fn write_json(&mut self, name: &str, mut value: Value) -> Result<()> {
        if let Value::Object(map) = &mut value {
            map.insert("config_hash".into(), Value::String(self.hash.clone()));
        }
        let mut text = serde_json::to_string_pretty(&value)?;
        text.push('\n');
        self.write_text(name, &text)
    }

    pub fn finish(self) -> Result<()> {
        let manifest = json!({
            "command": self.command,
            "config_hash": self.hash,
            "version": env!("CARGO_PKG_VERSION"),
            "wall_time_s": self.start.elapsed().as_secs_f64(),
            "config": self.config,
            "artifacts": self.artifacts,
        });
        let mut text = serde_json::to_string_pretty(&manifest)?;
        text.push('\n');
        let path = self.dir.join("manifest.json");
        std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        Ok(())
    }
}
