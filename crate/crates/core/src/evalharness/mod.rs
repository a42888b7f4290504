//! BLEU, the Q-task proxy, rubric bookkeeping and success-rate reports.

mod bleu;
mod report;
mod rubric;
mod store;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dsl::{code_tokens, CodeAst};
use crate::prompting::{Attempt, Scenario};
use crate::world::is_solution;

pub use bleu::bleu;
pub use report::{build_report, mean_std, Report, ReportRecord};
pub use rubric::{
    aggregate_success_rates, compute_q_overall, effective_ratings, q_task_proxy, round1, success_rate, Group, Metric, Rating,
    ReportCell, DEFAULT_Q_TASK_THRESHOLD,
};
pub use store::{load_ratings, RatingStore};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("empty candidate or reference")]
    EmptyInput,
    #[error("no attempts for {} on {}", .0.method_label, .0.reference_task_id)]
    EmptyGroup(Group),
    #[error("no ratings yet for {} on {}", .0.method_label, .0.reference_task_id)]
    NoRatings(Group),
    #[error("scenario {0} has more than one attempt in the group")]
    DuplicateScenario(String),
    #[error("invalid rating: {0}")]
    InvalidRating(String),
    #[error("ratings log: {0}")]
    Log(String),
}

/// BLEU-4 between two programs over their canonical token streams.
pub fn code_bleu(candidate: &CodeAst, reference: &CodeAst) -> Result<f64, EvalError> {
    bleu(&code_tokens(candidate), &[code_tokens(reference)], 4)
}

/// Automatic scores for one synthesized attempt.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AutoEvalRecord {
    pub attempt_id: String,
    pub scenario_id: String,
    pub method_label: String,
    pub reference_task_id: String,
    pub q_task_proxy: bool,
    pub q_task_score: f64,
    pub solves_target: bool,
    /// Similarity to the simulated student's own target attempt, when known.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bleu_vs_ground_truth: Option<f64>,
}

pub fn auto_evaluate(attempt: &Attempt, scenario: &Scenario) -> AutoEvalRecord {
    let (q_task, score) =
        q_task_proxy(attempt.code(), &scenario.target_task, &scenario.target_solution, DEFAULT_Q_TASK_THRESHOLD);
    AutoEvalRecord {
        attempt_id: attempt.id().to_string(),
        scenario_id: scenario.id.clone(),
        method_label: attempt.method_label().to_string(),
        reference_task_id: scenario.ref_task.id().to_string(),
        q_task_proxy: q_task,
        q_task_score: score,
        solves_target: is_solution(attempt.code(), &scenario.target_task),
        bleu_vs_ground_truth: scenario
            .ground_truth_target_attempt
            .as_ref()
            .and_then(|gt| code_bleu(attempt.code(), gt).ok()),
    }
}

/// Scenario id to reference task id.
pub fn reference_index(scenarios: &[Scenario]) -> BTreeMap<String, String> {
    scenarios.iter().map(|s| (s.id.clone(), s.ref_task.id().to_string())).collect()
}

/// Every (reference task, method) pair that has at least one attempt.
pub fn groups(attempts: &[Attempt], reference_of: &BTreeMap<String, String>) -> BTreeSet<Group> {
    attempts
        .iter()
        .filter_map(|a| reference_of.get(a.scenario_id()).map(|r| Group::new(r, a.method_label())))
        .collect()
}

/// One run's cells for every group, plus the groups nobody has rated yet.
pub fn run_cells(
    ratings: &[Rating],
    attempts: &[Attempt],
    scenarios: &[Scenario],
) -> Result<(Vec<ReportCell>, Vec<Group>), EvalError> {
    let reference_of = reference_index(scenarios);
    let mut cells = Vec::new();
    let mut unrated = Vec::new();
    for group in groups(attempts, &reference_of) {
        match aggregate_success_rates(ratings, attempts, &reference_of, &group) {
            Ok(c) => cells.extend(c),
            Err(EvalError::NoRatings(g)) => unrated.push(g),
            Err(e) => return Err(e),
        }
    }
    Ok((cells, unrated))
}

/// Report for one or more runs, each given as (ratings, attempts, scenarios).
pub fn report_for_runs(runs: &[(Vec<Rating>, Vec<Attempt>, Vec<Scenario>)]) -> Result<Report, EvalError> {
    let mut per_run = Vec::new();
    let mut unrated = BTreeSet::new();
    for (ratings, attempts, scenarios) in runs {
        let (cells, missing) = run_cells(ratings, attempts, scenarios)?;
        per_run.push(cells);
        unrated.extend(missing);
    }
    let mut report = build_report(&per_run);
    let rated: BTreeSet<&Group> = report.records.iter().map(|r| &r.group).collect();
    report.unrated = unrated.into_iter().filter(|g| !rated.contains(g)).collect();
    Ok(report)
}
