use std::collections::{BTreeMap, BTreeSet};

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use super::EvalError;
use crate::dsl::{code_tokens, CodeAst};
use crate::prompting::Attempt;
use crate::world::{is_solution, Task};

/// Q-overall: 1 exactly when both Q-stu and Q-task are 1.
pub fn compute_q_overall(q_stu: u8, q_task: u8) -> u8 {
    u8::from(q_stu == 1 && q_task == 1)
}

/// One rater's judgment of one attempt.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RatingRecord", into = "RatingRecord")]
pub struct Rating {
    pub rater_id: String,
    pub attempt_id: String,
    q_stu: u8,
    q_task: u8,
    pub submitted_at: DateTime<Utc>,
}

#[derive(Serialize, Deserialize)]
struct RatingRecord {
    rater_id: String,
    attempt_id: String,
    q_stu: u8,
    q_task: u8,
    submitted_at: DateTime<Utc>,
}

impl TryFrom<RatingRecord> for Rating {
    type Error = EvalError;

    fn try_from(r: RatingRecord) -> Result<Self, EvalError> {
        Rating::new(r.rater_id, r.attempt_id, r.q_stu, r.q_task, r.submitted_at)
    }
}

impl From<Rating> for RatingRecord {
    fn from(r: Rating) -> Self {
        RatingRecord { rater_id: r.rater_id, attempt_id: r.attempt_id, q_stu: r.q_stu, q_task: r.q_task, submitted_at: r.submitted_at }
    }
}

impl Rating {
    pub fn new(
        rater_id: impl Into<String>,
        attempt_id: impl Into<String>,
        q_stu: u8,
        q_task: u8,
        submitted_at: DateTime<Utc>,
    ) -> Result<Self, EvalError> {
        let rater_id = rater_id.into();
        if rater_id.trim().is_empty() {
            return Err(EvalError::InvalidRating("rater_id is empty".into()));
        }
        for (name, v) in [("q_stu", q_stu), ("q_task", q_task)] {
            if v > 1 {
                return Err(EvalError::InvalidRating(format!("{name} must be 0 or 1, got {v}")));
            }
        }
        Ok(Rating { rater_id, attempt_id: attempt_id.into(), q_stu, q_task, submitted_at })
    }

    pub fn q_stu(&self) -> u8 {
        self.q_stu
    }

    pub fn q_task(&self) -> u8 {
        self.q_task
    }

    pub fn q_overall(&self) -> u8 {
        compute_q_overall(self.q_stu, self.q_task)
    }
}

/// The rating in force for every (rater, attempt) pair: the latest submission,
/// with exact timestamp ties going to the higher scores so the result does not
/// depend on log order.
pub fn effective_ratings(ratings: &[Rating]) -> BTreeMap<(String, String), Rating> {
    let mut out: BTreeMap<(String, String), Rating> = BTreeMap::new();
    for r in ratings {
        let key = (r.rater_id.clone(), r.attempt_id.clone());
        let newer = out
            .get(&key)
            .is_none_or(|cur| (r.submitted_at, r.q_stu, r.q_task) > (cur.submitted_at, cur.q_stu, cur.q_task));
        if newer {
            out.insert(key, r.clone());
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Metric {
    #[serde(rename = "Q-stu")]
    QStu,
    #[serde(rename = "Q-task")]
    QTask,
    #[serde(rename = "Q-overall")]
    QOverall,
}

impl Metric {
    pub const ALL: [Metric; 3] = [Metric::QStu, Metric::QTask, Metric::QOverall];

    pub fn label(self) -> &'static str {
        match self {
            Metric::QStu => "Q-stu",
            Metric::QTask => "Q-task",
            Metric::QOverall => "Q-overall",
        }
    }
}

/// Reporting group: one method on one reference task.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Group {
    pub reference_task_id: String,
    pub method_label: String,
}

impl Group {
    pub fn new(reference_task_id: impl Into<String>, method_label: impl Into<String>) -> Self {
        Group { reference_task_id: reference_task_id.into(), method_label: method_label.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportCell {
    pub method_label: String,
    pub reference_task_id: String,
    pub metric: Metric,
    pub success_rate: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub std_dev: Option<f64>,
    /// Scenarios that contributed, i.e. rated attempts.
    pub scenario_count: usize,
    pub successes: usize,
    /// Set when some attempts of the group have no rating yet.
    #[serde(default)]
    pub incomplete: bool,
}

/// `100 * successes / total` rounded to one decimal, half away from zero,
/// computed in integers so exact halves round reliably.
pub fn success_rate(successes: usize, total: usize) -> f64 {
    assert!(total > 0 && successes <= total);
    let num = 1000 * successes as u64;
    let (q, r) = (num / total as u64, num % total as u64);
    let tenths = if 2 * r >= total as u64 { q + 1 } else { q };
    tenths as f64 / 10.0
}

/// Rounds to one decimal, half away from zero.
pub fn round1(x: f64) -> f64 {
    (x * 10.0).round() / 10.0
}

/// Majority vote of the raters of one attempt: (q_stu, q_task). A tie counts as 0.
fn consensus(ratings: &[&Rating]) -> (u8, u8) {
    let n = ratings.len();
    let stu = ratings.iter().filter(|r| r.q_stu == 1).count();
    let task = ratings.iter().filter(|r| r.q_task == 1).count();
    (u8::from(2 * stu > n), u8::from(2 * task > n))
}

/// Success rates of one group for Q-stu, Q-task and Q-overall.
///
/// `attempts` may span several groups; those whose method differs from
/// `group.method_label` or whose scenario maps to another reference task in
/// `reference_of` (scenario id to reference task id) are skipped. With several
/// raters per attempt each criterion is decided by majority and Q-overall is
/// the AND of the two decisions.
pub fn aggregate_success_rates(
    ratings: &[Rating],
    attempts: &[Attempt],
    reference_of: &BTreeMap<String, String>,
    group: &Group,
) -> Result<Vec<ReportCell>, EvalError> {
    let members: Vec<&Attempt> = attempts
        .iter()
        .filter(|a| a.method_label() == group.method_label)
        .filter(|a| reference_of.get(a.scenario_id()).is_some_and(|r| *r == group.reference_task_id))
        .collect();
    if members.is_empty() {
        return Err(EvalError::EmptyGroup(group.clone()));
    }
    let mut scenarios = BTreeSet::new();
    for a in &members {
        if !scenarios.insert(a.scenario_id()) {
            return Err(EvalError::DuplicateScenario(a.scenario_id().to_string()));
        }
    }
    let effective = effective_ratings(ratings);
    let mut by_attempt: BTreeMap<&str, Vec<&Rating>> = BTreeMap::new();
    for r in effective.values() {
        by_attempt.entry(r.attempt_id.as_str()).or_default().push(r);
    }
    let mut counts = [0usize; 3];
    let mut rated = 0;
    for a in &members {
        let Some(rs) = by_attempt.get(a.id()) else { continue };
        rated += 1;
        let (stu, task) = consensus(rs);
        counts[0] += stu as usize;
        counts[1] += task as usize;
        counts[2] += compute_q_overall(stu, task) as usize;
    }
    if rated == 0 {
        return Err(EvalError::NoRatings(group.clone()));
    }
    Ok(Metric::ALL
        .into_iter()
        .zip(counts)
        .map(|(metric, successes)| ReportCell {
            method_label: group.method_label.clone(),
            reference_task_id: group.reference_task_id.clone(),
            metric,
            success_rate: success_rate(successes, rated),
            std_dev: None,
            scenario_count: rated,
            successes,
            incomplete: rated < members.len(),
        })
        .collect())
}

fn lcs_len(a: &[String], b: &[String]) -> usize {
    let mut row = vec![0usize; b.len() + 1];
    for x in a {
        let mut diag = 0;
        for (j, y) in b.iter().enumerate() {
            let up = row[j + 1];
            row[j + 1] = if x == y { diag + 1 } else { up.max(row[j]) };
            diag = up;
        }
    }
    row[b.len()]
}

pub const DEFAULT_Q_TASK_THRESHOLD: f64 = 0.5;

/// Automatic stand-in for the Q-task judgment: the share of solution tokens
/// kept, in order, by the attempt (token LCS over solution length). Passes at
/// `threshold` or when the attempt solves the target outright.
pub fn q_task_proxy(attempt: &CodeAst, target_task: &Task, target_solution: &CodeAst, threshold: f64) -> (bool, f64) {
    let sol = code_tokens(target_solution);
    let att = code_tokens(attempt);
    let score = if sol.is_empty() { 0.0 } else { lcs_len(&att, &sol) as f64 / sol.len() as f64 };
    (score >= threshold || is_solution(attempt, target_task), score)
}
