//! Loading and overriding the run configuration.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use sha2::{Digest, Sha256};
use strip_core::config::RunConfig;
use strip_core::Error;

pub fn parse(text: &str) -> Result<RunConfig, Error> {
    let de = toml::Deserializer::new(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        Error::BadConfig { path, reason: e.into_inner().message().trim().to_string() }
    })
}

pub fn load(path: Option<&Path>, out: Option<PathBuf>, workers: Option<usize>, seed: Option<u64>) -> Result<RunConfig> {
    let mut cfg = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            parse(&text).with_context(|| format!("loading {}", p.display()))?
        }
        None => RunConfig::default(),
    };
    if let Some(o) = out {
        cfg.output_dir = o;
    }
    if let Some(w) = workers {
        cfg.workers = w;
    }
    if let Some(s) = seed {
        cfg.seed = s;
    }
    cfg.validate()?;
    Ok(cfg)
}

/// SHA-256 of the canonical JSON form of the configuration, leaving out the
/// output directory and worker count, which do not affect results.
pub fn config_hash(cfg: &RunConfig) -> String {
    let mut c = cfg.clone();
    c.output_dir = PathBuf::new();
    c.workers = 1;
    let json = serde_json::to_string(&c).expect("config serializes");
    let digest = Sha256::digest(json.as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}
