use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use chrono::{DateTime, TimeDelta, Utc};
use llmss::evalharness::{effective_ratings, report_for_runs, EvalError, Rating, RatingStore, Report};
use llmss::pipeline::{load_attempts, load_scenarios, PipelineError, RATINGS};
use llmss::prompting::{Attempt, Scenario};
use llmss::{print_code, print_grid};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum BundleError {
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
    #[error("attempt {attempt} names scenario {scenario}, which is not in the run")]
    DanglingAttempt { attempt: String, scenario: String },
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
}

#[derive(Debug, Error)]
pub enum SubmitError {
    #[error("unknown attempt {0}")]
    AttemptNotFound(String),
    #[error(transparent)]
    Invalid(EvalError),
    #[error("ratings log: {0}")]
    Io(#[from] std::io::Error),
}

/// Bijection between method labels and the opaque labels raters see.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Blinding {
    to_opaque: BTreeMap<String, String>,
    to_label: BTreeMap<String, String>,
}

fn opaque_name(i: usize) -> String {
    let mut n = i + 1;
    let mut letters = Vec::new();
    while n > 0 {
        n -= 1;
        letters.push(b'A' + (n % 26) as u8);
        n /= 26;
    }
    letters.reverse();
    format!("Method {}", String::from_utf8(letters).expect("ascii"))
}

impl Blinding {
    /// Assigns opaque labels in an order drawn from `run_id`, so the same run
    /// always shows the same labels. With `enabled` false every label maps to itself.
    pub fn new<'a>(run_id: &str, labels: impl IntoIterator<Item = &'a str>, enabled: bool) -> Self {
        let mut labels: Vec<&str> = labels.into_iter().collect::<BTreeSet<_>>().into_iter().collect();
        if enabled {
            let digest = Sha256::digest(format!("blind:{run_id}").as_bytes());
            let seed: [u8; 32] = digest.into();
            labels.shuffle(&mut ChaCha8Rng::from_seed(seed));
        }
        let mut to_opaque = BTreeMap::new();
        let mut to_label = BTreeMap::new();
        for (i, label) in labels.into_iter().enumerate() {
            let opaque = if enabled { opaque_name(i) } else { label.to_string() };
            to_opaque.insert(label.to_string(), opaque.clone());
            to_label.insert(opaque, label.to_string());
        }
        Blinding { to_opaque, to_label }
    }

    pub fn opaque(&self, label: &str) -> Option<&str> {
        self.to_opaque.get(label).map(String::as_str)
    }

    pub fn reveal(&self, opaque: &str) -> Option<&str> {
        self.to_label.get(opaque).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.to_opaque.len()
    }

    pub fn is_empty(&self) -> bool {
        self.to_opaque.is_empty()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Progress {
    pub rated: usize,
    pub total: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScenarioSummary {
    pub id: String,
    pub reference_task_id: String,
    pub target_task_id: String,
    pub progress: Progress,
}

#[derive(Debug, Clone, Serialize)]
pub struct TaskView {
    pub task_id: String,
    pub grid: String,
    pub solution: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct RatingView {
    pub q_stu: u8,
    pub q_task: u8,
    pub q_overall: u8,
    pub submitted_at: DateTime<Utc>,
}

#[derive(Debug, Clone, Serialize)]
pub struct AttemptView {
    pub attempt_id: String,
    pub label: String,
    pub code: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rating: Option<RatingView>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScenarioDetail {
    pub id: String,
    pub reference: TaskView,
    pub reference_student_attempt: String,
    pub target: TaskView,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ground_truth_target_attempt: Option<String>,
    pub attempts: Vec<AttemptView>,
}

/// A run as served to raters. Scenarios and attempts are read once; ratings
/// are read from the log on every request.
#[derive(Debug)]
pub struct RunBundle {
    pub run_id: String,
    pub scenarios: Vec<Scenario>,
    pub attempts: Vec<Attempt>,
    pub blinding: Blinding,
    store: RatingStore,
    last_submit: Mutex<Option<DateTime<Utc>>>,
}

impl RunBundle {
    pub fn load(run_id: impl Into<String>, dir: &Path, blind: bool) -> Result<Self, BundleError> {
        let run_id = run_id.into();
        let mut scenarios = load_scenarios(dir)?;
        scenarios.sort_by(|a, b| a.id.cmp(&b.id));
        let attempts = load_attempts(dir)?;
        let ids: BTreeSet<&str> = scenarios.iter().map(|s| s.id.as_str()).collect();
        if let Some(a) = attempts.iter().find(|a| !ids.contains(a.scenario_id())) {
            return Err(BundleError::DanglingAttempt { attempt: a.id().into(), scenario: a.scenario_id().into() });
        }
        let blinding = Blinding::new(&run_id, attempts.iter().map(Attempt::method_label), blind);
        let path = dir.join(RATINGS);
        let store = RatingStore::open(&path).map_err(|source| BundleError::Io { path, source })?;
        Ok(RunBundle { run_id, scenarios, attempts, blinding, store, last_submit: Mutex::new(None) })
    }

    fn attempts_of<'a>(&'a self, scenario_id: &'a str) -> impl Iterator<Item = &'a Attempt> + 'a {
        self.attempts.iter().filter(move |a| a.scenario_id() == scenario_id)
    }

    fn effective(&self) -> Result<BTreeMap<(String, String), Rating>, EvalError> {
        Ok(effective_ratings(&self.store.load()?))
    }

    /// Scenarios by id. Progress counts attempts rated by `rater`, or by anyone.
    pub fn summaries(&self, rater: Option<&str>) -> Result<Vec<ScenarioSummary>, EvalError> {
        let effective = self.effective()?;
        let rated: BTreeSet<&str> = effective
            .values()
            .filter(|r| rater.is_none_or(|id| r.rater_id == id))
            .map(|r| r.attempt_id.as_str())
            .collect();
        Ok(self
            .scenarios
            .iter()
            .map(|s| {
                let ids: Vec<&str> = self.attempts_of(&s.id).map(Attempt::id).collect();
                ScenarioSummary {
                    id: s.id.clone(),
                    reference_task_id: s.ref_task.id().into(),
                    target_task_id: s.target_task.id().into(),
                    progress: Progress { rated: ids.iter().filter(|id| rated.contains(*id)).count(), total: ids.len() },
                }
            })
            .collect())
    }

    /// Full scenario with its attempts ordered by presented label. `rater`
    /// adds that rater's current judgment to each attempt.
    pub fn detail(&self, scenario_id: &str, rater: Option<&str>) -> Result<Option<ScenarioDetail>, EvalError> {
        let Some(s) = self.scenarios.iter().find(|s| s.id == scenario_id) else { return Ok(None) };
        let effective = match rater {
            Some(_) => self.effective()?,
            None => BTreeMap::new(),
        };
        let mut attempts: Vec<AttemptView> = self
            .attempts_of(&s.id)
            .map(|a| AttemptView {
                attempt_id: a.id().into(),
                label: self.blinding.opaque(a.method_label()).expect("every method is blinded").into(),
                code: print_code(a.code()),
                rating: rater.and_then(|r| effective.get(&(r.to_string(), a.id().to_string()))).map(|r| RatingView {
                    q_stu: r.q_stu(),
                    q_task: r.q_task(),
                    q_overall: r.q_overall(),
                    submitted_at: r.submitted_at,
                }),
            })
            .collect();
        attempts.sort_by(|a, b| a.label.cmp(&b.label));
        let view = |t: &llmss::Task, sol| TaskView { task_id: t.id().into(), grid: print_grid(t), solution: print_code(sol) };
        Ok(Some(ScenarioDetail {
            id: s.id.clone(),
            reference: view(&s.ref_task, &s.ref_solution),
            reference_student_attempt: print_code(&s.ref_student_attempt),
            target: view(&s.target_task, &s.target_solution),
            ground_truth_target_attempt: s.ground_truth_target_attempt.as_ref().map(print_code),
            attempts,
        }))
    }

    /// Validates and durably appends a rating. Timestamps within a run strictly
    /// increase, so a resubmission always supersedes the earlier one.
    pub fn submit(&self, rater_id: &str, attempt_id: &str, q_stu: u8, q_task: u8) -> Result<Rating, SubmitError> {
        if !self.attempts.iter().any(|a| a.id() == attempt_id) {
            return Err(SubmitError::AttemptNotFound(attempt_id.into()));
        }
        let mut last = self.last_submit.lock().unwrap();
        let mut now = Utc::now();
        if let Some(prev) = *last {
            now = now.max(prev + TimeDelta::microseconds(1));
        }
        let rating = Rating::new(rater_id, attempt_id, q_stu, q_task, now).map_err(SubmitError::Invalid)?;
        self.store.append(&rating)?;
        *last = Some(now);
        Ok(rating)
    }

    /// Aggregate report with real method labels.
    pub fn report(&self) -> Result<Report, EvalError> {
        report_for_runs(&[(self.store.load()?, self.attempts.clone(), self.scenarios.clone())])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn blinding_is_a_stable_bijection() {
        let labels = ["gpt-4", "gpt-3.5", "tutor", "gpt-4"];
        let b = Blinding::new("run-1", labels, true);
        assert_eq!(b.len(), 3);
        for l in labels {
            let o = b.opaque(l).unwrap();
            assert!(o.starts_with("Method "));
            assert_eq!(b.reveal(o), Some(l));
        }
        assert_eq!(b, Blinding::new("run-1", labels, true));
        let plain = Blinding::new("run-1", labels, false);
        assert_eq!(plain.opaque("tutor"), Some("tutor"));
    }

    #[test]
    fn opaque_names() {
        assert_eq!(opaque_name(0), "Method A");
        assert_eq!(opaque_name(25), "Method Z");
        assert_eq!(opaque_name(26), "Method AA");
    }
}
