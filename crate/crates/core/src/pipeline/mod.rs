//! Run-directory orchestration.
//!
//! A run directory holds every input, output and the response cache of one
//! experiment:
//!
//! ```text
//! manifest.json            config, seeds and digests of everything below
//! tasks.jsonl              training task corpus
//! tasks_val.jsonl          validation tasks (scenario targets come from here)
//! finetune_train.jsonl     expert prompt / solution pairs
//! finetune_val.jsonl
//! scenarios.jsonl
//! attempts/<model>.jsonl   synthesized attempts, one file per method
//! auto_eval.jsonl          BLEU and Q-task proxy per attempt
//! ratings.jsonl            append-only human ratings log
//! report.json, report.txt
//! cache/                   LLM response cache
//! ```

mod manifest;
mod steps;

use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::evalharness::EvalError;
use crate::jsonl::JsonlError;
use crate::llm_client::{ClientError, DEFAULT_TEMPERATURE};
use crate::synthgen::SynthgenError;

pub use manifest::{file_digest, Manifest, StepRecord};
pub use steps::{
    auto_eval, gen_finetune, gen_tasks, load_attempts, load_scenarios, make_scenarios, report, synthesize, GenTasksArgs, MakeScenariosArgs, ReportArgs,
    SynthesisFailure, SynthesizeArgs, SynthesizeSummary,
};

pub const MANIFEST: &str = "manifest.json";
pub const TASKS: &str = "tasks.jsonl";
pub const TASKS_VAL: &str = "tasks_val.jsonl";
pub const FINETUNE_TRAIN: &str = "finetune_train.jsonl";
pub const FINETUNE_VAL: &str = "finetune_val.jsonl";
pub const SCENARIOS: &str = "scenarios.jsonl";
pub const ATTEMPTS_DIR: &str = "attempts";
pub const AUTO_EVAL: &str = "auto_eval.jsonl";
pub const RATINGS: &str = "ratings.jsonl";
pub const REPORT_JSON: &str = "report.json";
pub const REPORT_TXT: &str = "report.txt";
pub const CACHE_DIR: &str = "cache";

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("missing {what}: {} (run `{hint}` first)", path.display())]
    Missing { what: &'static str, path: PathBuf, hint: &'static str },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Jsonl(#[from] JsonlError),
    #[error(transparent)]
    Synthgen(#[from] SynthgenError),
    #[error(transparent)]
    Client(#[from] ClientError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("{0}")]
    Data(String),
}

impl PipelineError {
    pub(crate) fn io(path: &Path) -> impl FnOnce(std::io::Error) -> PipelineError + '_ {
        move |source| PipelineError::Io { path: path.to_path_buf(), source }
    }
}

/// Settings shared by every subcommand.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub run_dir: PathBuf,
    pub model: String,
    pub temperature: f64,
    /// Total queries allowed per scenario.
    pub max_retries: u32,
    pub parallelism: usize,
    pub seed: u64,
    /// Stub script replacing the live provider.
    pub stub: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(run_dir: impl Into<PathBuf>) -> Self {
        RunConfig {
            run_dir: run_dir.into(),
            model: "gpt-4".into(),
            temperature: DEFAULT_TEMPERATURE,
            max_retries: 3,
            parallelism: 4,
            seed: 0,
            stub: None,
        }
    }

    pub fn check(&self) -> Result<(), PipelineError> {
        if self.parallelism == 0 {
            return Err(PipelineError::Config("parallelism must be at least 1".into()));
        }
        if self.max_retries == 0 {
            return Err(PipelineError::Config("max-retries must be at least 1".into()));
        }
        if !self.temperature.is_finite() || !(0.0..=2.0).contains(&self.temperature) {
            return Err(PipelineError::Config(format!("temperature {} outside [0, 2]", self.temperature)));
        }
        if self.model.trim().is_empty() {
            return Err(PipelineError::Config("model is empty".into()));
        }
        std::fs::create_dir_all(&self.run_dir).map_err(PipelineError::io(&self.run_dir))?;
        Ok(())
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.run_dir.join(name)
    }

    /// Attempts file of the configured model.
    pub fn attempts_path(&self) -> PathBuf {
        self.run_dir.join(ATTEMPTS_DIR).join(format!("{}.jsonl", model_slug(&self.model)))
    }
}

/// File-name-safe form of a model identifier.
pub fn model_slug(model: &str) -> String {
    model.chars().map(|c| if c.is_ascii_alphanumeric() || "._-".contains(c) { c } else { '_' }).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slug() {
        assert_eq!(model_slug("org/model:v1.5"), "org_model_v1.5");
    }

    #[test]
    fn config_checks() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = RunConfig::new(dir.path().join("run"));
        assert!(cfg.check().is_ok());
        assert!(cfg.run_dir.is_dir());
        cfg.parallelism = 0;
        assert!(cfg.check().is_err());
        cfg.parallelism = 1;
        cfg.temperature = 3.0;
        assert!(cfg.check().is_err());
    }
}
