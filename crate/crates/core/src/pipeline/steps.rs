use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;
use sha2::{Digest, Sha256};

use super::manifest::Manifest;
use super::{
    model_slug, PipelineError, RunConfig, ATTEMPTS_DIR, AUTO_EVAL, CACHE_DIR, FINETUNE_TRAIN, FINETUNE_VAL, RATINGS,
    REPORT_JSON, REPORT_TXT, SCENARIOS, TASKS, TASKS_VAL,
};
use crate::evalharness::{auto_evaluate, load_ratings, report_for_runs, AutoEvalRecord, Report};
use crate::jsonl;
use crate::llm_client::{build_client, ClientConfig};
use crate::prompting::{synthesize_with_retry, Attempt, Scenario, SynthesisError, SynthesisSettings};
use crate::reference;
use crate::synthgen::{
    apply_misconception, generate_tasks, synthesize_solution, CorpusSpec, FinetuneRecord, FullScale, MutationOp, MutationSpec,
    StudentProfile,
};
use crate::world::Task;

/// 64-bit seed derived from the run seed and a label.
fn derive_seed(seed: u64, label: &str) -> u64 {
    let digest = Sha256::digest(format!("{seed}:{label}").as_bytes());
    u64::from_le_bytes(digest[..8].try_into().expect("digest has 32 bytes"))
}

fn reference_task(name: &str) -> Result<reference::ReferenceTask, PipelineError> {
    reference::by_name(name).ok_or_else(|| {
        PipelineError::Config(format!("unknown reference task {name:?} (known: {})", reference::NAMES.join(", ")))
    })
}

fn require(path: PathBuf, what: &'static str, hint: &'static str) -> Result<PathBuf, PipelineError> {
    if path.exists() {
        Ok(path)
    } else {
        Err(PipelineError::Missing { what, path, hint })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GenTasksArgs {
    pub references: Vec<String>,
    pub count: usize,
    pub validation: usize,
    /// Inclusive bounds on the shortest path length of generated tasks.
    pub path_bounds: (usize, usize),
}

impl Default for GenTasksArgs {
    fn default() -> Self {
        GenTasksArgs { references: vec![reference::HOC4.into()], count: 1000, validation: 100, path_bounds: (1, 40) }
    }
}

impl GenTasksArgs {
    /// Corpus sizes of the full-scale setting for one reference family.
    pub fn full_scale(scale: FullScale) -> Self {
        let (count, validation) = scale.sizes();
        let name = match scale {
            FullScale::Hoc4 => reference::HOC4,
            FullScale::Hoc18 => reference::HOC18,
        };
        GenTasksArgs { references: vec![name.into()], count, validation, ..Default::default() }
    }
}

/// Grows `count + validation` distinct tasks around each reference task and
/// splits them into `tasks.jsonl` and `tasks_val.jsonl`. Returns the record
/// counts written.
pub fn gen_tasks(cfg: &RunConfig, args: &GenTasksArgs) -> Result<(usize, usize), PipelineError> {
    cfg.check()?;
    let mut train = Vec::new();
    let mut val = Vec::new();
    for name in &args.references {
        let seed = reference_task(name)?.task;
        let mutation = MutationSpec::new(MutationOp::ALL.to_vec(), args.path_bounds, derive_seed(cfg.seed, name))?;
        let mut tasks = generate_tasks(&seed, &CorpusSpec::new(mutation, name.as_str()), args.count + args.validation)?;
        val.extend(tasks.split_off(args.count));
        train.extend(tasks);
    }
    let n_train = jsonl::write(&cfg.path(TASKS), &train)?;
    let n_val = jsonl::write(&cfg.path(TASKS_VAL), &val)?;
    Manifest::record(cfg, "gen-tasks", json!(args), &[TASKS, TASKS_VAL])?;
    Ok((n_train, n_val))
}

fn read_tasks(cfg: &RunConfig, name: &'static str) -> Result<Vec<Task>, PipelineError> {
    let path = require(cfg.path(name), "task corpus", "gen-tasks")?;
    Ok(jsonl::read(&path)?)
}

/// Writes expert-prompt fine-tuning records for both task splits.
pub fn gen_finetune(cfg: &RunConfig) -> Result<(usize, usize), PipelineError> {
    cfg.check()?;
    let mut counts = [0; 2];
    for (i, (input, output)) in [(TASKS, FINETUNE_TRAIN), (TASKS_VAL, FINETUNE_VAL)].into_iter().enumerate() {
        let tasks = read_tasks(cfg, input)?;
        let records: Vec<FinetuneRecord> = tasks.par_iter().map(FinetuneRecord::for_task).collect();
        counts[i] = jsonl::write(&cfg.path(output), &records)?;
    }
    Manifest::record(cfg, "gen-finetune", json!({}), &[FINETUNE_TRAIN, FINETUNE_VAL])?;
    Ok((counts[0], counts[1]))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MakeScenariosArgs {
    pub references: Vec<String>,
    /// Target tasks per reference task.
    pub targets: usize,
    /// Student profiles file; the default roster has one student per misconception.
    pub profiles: Option<PathBuf>,
}

impl Default for MakeScenariosArgs {
    fn default() -> Self {
        MakeScenariosArgs { references: vec![reference::HOC4.into()], targets: 3, profiles: None }
    }
}

/// One scenario per (reference, target, profile). Targets are drawn from the
/// validation split of each reference's corpus in a seed-determined order.
pub fn make_scenarios(cfg: &RunConfig, args: &MakeScenariosArgs) -> Result<Vec<Scenario>, PipelineError> {
    cfg.check()?;
    let profiles = match &args.profiles {
        Some(path) => jsonl::read::<StudentProfile>(path)?,
        None => StudentProfile::default_roster(),
    };
    if profiles.is_empty() {
        return Err(PipelineError::Config("no student profiles".into()));
    }
    let pool = read_tasks(cfg, TASKS_VAL)?;
    let mut scenarios = Vec::new();
    for name in &args.references {
        let reference = reference_task(name)?;
        let prefix = format!("{name}-");
        let mut candidates: Vec<&Task> = pool.iter().filter(|t| t.id().starts_with(&prefix)).collect();
        if candidates.len() < args.targets {
            return Err(PipelineError::Data(format!(
                "{name}: need {} validation tasks for targets, found {}",
                args.targets,
                candidates.len()
            )));
        }
        let order_seed = derive_seed(cfg.seed, &format!("targets/{name}"));
        candidates.sort_by_key(|t| (derive_seed(order_seed, t.id()), t.id().to_string()));
        for (i, target) in candidates.into_iter().take(args.targets).enumerate() {
            let target_solution = synthesize_solution(target);
            for profile in &profiles {
                let ref_attempt = apply_misconception(&reference.solution, profile, &reference.task)
                    .map_err(|e| PipelineError::Data(format!("{name} / {}: {e}", profile.id)))?;
                let scenario = Scenario {
                    id: format!("{name}-t{}-{}", i + 1, profile.id),
                    ref_task: reference.task.clone(),
                    ref_solution: reference.solution.clone(),
                    ref_student_attempt: ref_attempt,
                    target_task: target.clone(),
                    target_solution: target_solution.clone(),
                    ground_truth_target_attempt: apply_misconception(&target_solution, profile, target).ok(),
                    student_profile: Some(profile.clone()),
                };
                scenario.validate().map_err(|e| PipelineError::Data(e.to_string()))?;
                scenarios.push(scenario);
            }
        }
    }
    jsonl::write(&cfg.path(SCENARIOS), &scenarios)?;
    Manifest::record(cfg, "make-scenarios", json!(args), &[SCENARIOS])?;
    Ok(scenarios)
}

pub fn load_scenarios(run_dir: &Path) -> Result<Vec<Scenario>, PipelineError> {
    let path = require(run_dir.join(SCENARIOS), "scenario file", "make-scenarios")?;
    Ok(jsonl::read(&path)?)
}

/// Every attempt in `attempts/*.jsonl`, files taken in name order.
pub fn load_attempts(run_dir: &Path) -> Result<Vec<Attempt>, PipelineError> {
    let dir = run_dir.join(ATTEMPTS_DIR);
    let mut files: Vec<PathBuf> = match fs::read_dir(&dir) {
        Ok(entries) => entries
            .filter_map(Result::ok)
            .map(|e| e.path())
            .filter(|p| {
                let name = p.file_name().and_then(|n| n.to_str()).unwrap_or_default();
                name.ends_with(".jsonl") && !name.ends_with(".failures.jsonl")
            })
            .collect(),
        Err(_) => Vec::new(),
    };
    files.sort();
    let mut out = Vec::new();
    for f in files {
        out.extend(jsonl::read::<Attempt>(&f)?);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct SynthesizeArgs {
    /// Scenario file to use instead of the run's own; it is copied into the run.
    pub scenarios: Option<PathBuf>,
    /// Label stored on attempts; defaults to the model name.
    pub method_label: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthesisFailure {
    pub scenario_id: String,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthesizeSummary {
    pub attempts: Vec<Attempt>,
    pub failures: Vec<SynthesisFailure>,
    pub attempts_path: PathBuf,
}

/// Queries the configured model once per scenario (re-querying on unusable
/// output) with at most `parallelism` requests in flight. Attempts are written
/// in scenario order, so the file does not depend on scheduling.
pub fn synthesize(cfg: &RunConfig, args: &SynthesizeArgs) -> Result<SynthesizeSummary, PipelineError> {
    cfg.check()?;
    let scenarios: Vec<Scenario> = match &args.scenarios {
        Some(path) => {
            let s: Vec<Scenario> = jsonl::read(path)?;
            jsonl::write(&cfg.path(SCENARIOS), &s)?;
            s
        }
        None => load_scenarios(&cfg.run_dir)?,
    };
    let client = build_client(&ClientConfig {
        stub: cfg.stub.clone(),
        cache_dir: Some(cfg.path(CACHE_DIR)),
        parallelism: cfg.parallelism,
    })?;
    let mut settings = SynthesisSettings::new(&cfg.model);
    settings.temperature = cfg.temperature;
    settings.max_retries = cfg.max_retries;
    if let Some(label) = &args.method_label {
        settings.method_label = label.clone();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.parallelism)
        .build()
        .map_err(|e| PipelineError::Config(e.to_string()))?;
    let results: Vec<Result<Attempt, SynthesisError>> =
        pool.install(|| scenarios.par_iter().map(|s| synthesize_with_retry(&*client, s, &settings)).collect());

    let mut attempts = Vec::new();
    let mut failures = Vec::new();
    for (scenario, result) in scenarios.iter().zip(results) {
        match result {
            Ok(a) => attempts.push(a),
            Err(SynthesisError::Client(e)) => return Err(e.into()),
            Err(e) => failures.push(SynthesisFailure { scenario_id: scenario.id.clone(), error: e.to_string() }),
        }
    }
    let dir = cfg.path(ATTEMPTS_DIR);
    fs::create_dir_all(&dir).map_err(PipelineError::io(&dir))?;
    let slug = model_slug(&settings.method_label);
    let attempts_rel = format!("{ATTEMPTS_DIR}/{slug}.jsonl");
    let failures_rel = format!("{ATTEMPTS_DIR}/{slug}.failures.jsonl");
    jsonl::write(&cfg.path(&attempts_rel), &attempts)?;
    jsonl::write(&cfg.path(&failures_rel), &failures)?;
    Manifest::record(cfg, &format!("synthesize/{slug}"), json!(args), &[SCENARIOS, &attempts_rel, &failures_rel])?;
    Ok(SynthesizeSummary { attempts, failures, attempts_path: cfg.path(&attempts_rel) })
}

/// Scores every attempt of the run against its scenario.
pub fn auto_eval(cfg: &RunConfig) -> Result<Vec<AutoEvalRecord>, PipelineError> {
    cfg.check()?;
    let scenarios = load_scenarios(&cfg.run_dir)?;
    let attempts = load_attempts(&cfg.run_dir)?;
    if attempts.is_empty() {
        return Err(PipelineError::Missing { what: "attempts", path: cfg.path(ATTEMPTS_DIR), hint: "synthesize" });
    }
    let records = attempts
        .iter()
        .map(|a| {
            let scenario = scenarios
                .iter()
                .find(|s| s.id == a.scenario_id())
                .ok_or_else(|| PipelineError::Data(format!("attempt {} names unknown scenario {}", a.id(), a.scenario_id())))?;
            Ok(auto_evaluate(a, scenario))
        })
        .collect::<Result<Vec<_>, PipelineError>>()?;
    jsonl::write(&cfg.path(AUTO_EVAL), &records)?;
    Manifest::record(cfg, "auto-eval", json!({}), &[AUTO_EVAL])?;
    Ok(records)
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct ReportArgs {
    /// Run directories to average over; defaults to the configured run alone.
    pub runs: Vec<PathBuf>,
}

/// Report over the ratings of one or more runs. Writes `report.json` and
/// `report.txt` into the configured run directory.
pub fn report(cfg: &RunConfig, args: &ReportArgs) -> Result<Report, PipelineError> {
    cfg.check()?;
    let runs = if args.runs.is_empty() { vec![cfg.run_dir.clone()] } else { args.runs.clone() };
    let mut inputs = Vec::new();
    let mut seen = BTreeSet::new();
    for dir in &runs {
        if !seen.insert(dir.clone()) {
            return Err(PipelineError::Config(format!("run {} listed twice", dir.display())));
        }
        let ratings = load_ratings(&dir.join(RATINGS))?;
        inputs.push((ratings, load_attempts(dir)?, load_scenarios(dir)?));
    }
    let report = report_for_runs(&inputs)?;
    let json_path = cfg.path(REPORT_JSON);
    let mut text = serde_json::to_string_pretty(&report).expect("report serializes");
    text.push('\n');
    fs::write(&json_path, text).map_err(PipelineError::io(&json_path))?;
    let txt_path = cfg.path(REPORT_TXT);
    fs::write(&txt_path, report.render_table()).map_err(PipelineError::io(&txt_path))?;
    Manifest::record(cfg, "report", json!(args), &[REPORT_JSON, REPORT_TXT])?;
    Ok(report)
}
