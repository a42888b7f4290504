use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use super::{PipelineError, RunConfig, CACHE_DIR, MANIFEST};

/// What one subcommand consumed and produced.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct StepRecord {
    pub args: Value,
    /// Output file (relative to the run directory) to SHA-256.
    pub outputs: BTreeMap<String, String>,
}

/// Replay record of a run. Holds no timestamps, so repeating a step with the
/// same inputs leaves it unchanged.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub config: Value,
    /// How the synthesis prompt is delivered to the provider.
    pub prompt_delivery: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stub_digest: Option<String>,
    pub cache: Value,
    pub steps: BTreeMap<String, StepRecord>,
}

/// SHA-256 of a file's bytes, lowercase hex.
pub fn file_digest(path: &Path) -> Result<String, PipelineError> {
    let bytes = fs::read(path).map_err(PipelineError::io(path))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

fn cache_summary(dir: &Path) -> Result<Value, PipelineError> {
    let mut names: Vec<String> = match fs::read_dir(dir) {
        Ok(entries) => entries
            .filter_map(Result::ok)
            .map(|e| e.file_name().to_string_lossy().into_owned())
            .filter(|n| n.ends_with(".json") && !n.starts_with('.'))
            .collect(),
        Err(_) => Vec::new(),
    };
    names.sort();
    let mut hasher = Sha256::new();
    for name in &names {
        hasher.update(name.as_bytes());
        hasher.update(file_digest(&dir.join(name))?.as_bytes());
    }
    Ok(serde_json::json!({ "entries": names.len(), "digest": hex::encode(hasher.finalize()) }))
}

impl Manifest {
    pub fn load(run_dir: &Path) -> Option<Manifest> {
        let bytes = fs::read(run_dir.join(MANIFEST)).ok()?;
        serde_json::from_slice(&bytes).ok()
    }

    /// Records `step` with its outputs and refreshes config and cache digests.
    pub fn record(cfg: &RunConfig, step: &str, args: Value, outputs: &[&str]) -> Result<Manifest, PipelineError> {
        let mut manifest = Manifest::load(&cfg.run_dir).unwrap_or_default();
        manifest.tool = "llmss".into();
        manifest.version = env!("CARGO_PKG_VERSION").into();
        manifest.config = serde_json::json!({
            "model": cfg.model,
            "temperature": cfg.temperature,
            "max_retries": cfg.max_retries,
            "parallelism": cfg.parallelism,
            "seed": cfg.seed,
        });
        manifest.prompt_delivery = "single user message".into();
        if let Some(stub) = &cfg.stub {
            manifest.stub_digest = Some(file_digest(stub)?);
        }
        manifest.cache = cache_summary(&cfg.path(CACHE_DIR))?;
        let mut record = StepRecord { args, outputs: BTreeMap::new() };
        for out in outputs {
            record.outputs.insert(out.to_string(), file_digest(&cfg.path(out))?);
        }
        manifest.steps.insert(step.to_string(), record);
        let path = cfg.path(MANIFEST);
        let mut text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
        text.push('\n');
        fs::write(&path, text).map_err(PipelineError::io(&path))?;
        Ok(manifest)
    }
}
