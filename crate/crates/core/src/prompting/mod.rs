//! Scenario and attempt records, the two prompt templates, response
//! extraction and the re-query loop.

mod extract;
mod template;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::dsl::{validate_blocks, BlockSet, CodeAst};
use crate::llm_client::{ClientError, CompletionRequest, LlmClient, DEFAULT_MAX_OUTPUT_TOKENS, DEFAULT_TEMPERATURE};
use crate::synthgen::StudentProfile;
use crate::world::{is_solution, Task};

pub use extract::{extract_attempt, ExtractionError};
pub use template::{
    build_expert_prompt, build_synthesis_prompt, domain_background, EXPERT_GRID, EXPERT_INSTRUCTION, REF_ATTEMPT, REF_GRID,
    REF_SOLUTION, SYNTHESIS_DELIMITERS, TARGET_ATTEMPT, TARGET_GRID, TARGET_SOLUTION,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScenarioError {
    #[error("scenario {id}: {problem}")]
    Invalid { id: String, problem: String },
}

/// What the synthesizer observes (reference task, its solution, the student's
/// attempt on it) together with the target task and its solution.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "ScenarioRecord", into = "ScenarioRecord")]
pub struct Scenario {
    pub id: String,
    pub ref_task: Task,
    pub ref_solution: CodeAst,
    pub ref_student_attempt: CodeAst,
    pub target_task: Task,
    pub target_solution: CodeAst,
    pub ground_truth_target_attempt: Option<CodeAst>,
    pub student_profile: Option<StudentProfile>,
}

#[derive(Serialize, Deserialize)]
struct ScenarioRecord {
    id: String,
    ref_task: Task,
    ref_solution: CodeAst,
    ref_student_attempt: CodeAst,
    target_task: Task,
    target_solution: CodeAst,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    ground_truth_target_attempt: Option<CodeAst>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    student_profile: Option<StudentProfile>,
}

impl TryFrom<ScenarioRecord> for Scenario {
    type Error = ScenarioError;

    fn try_from(r: ScenarioRecord) -> Result<Self, Self::Error> {
        let s = Scenario {
            id: r.id,
            ref_task: r.ref_task,
            ref_solution: r.ref_solution,
            ref_student_attempt: r.ref_student_attempt,
            target_task: r.target_task,
            target_solution: r.target_solution,
            ground_truth_target_attempt: r.ground_truth_target_attempt,
            student_profile: r.student_profile,
        };
        s.validate()?;
        Ok(s)
    }
}

impl From<Scenario> for ScenarioRecord {
    fn from(s: Scenario) -> Self {
        ScenarioRecord {
            id: s.id,
            ref_task: s.ref_task,
            ref_solution: s.ref_solution,
            ref_student_attempt: s.ref_student_attempt,
            target_task: s.target_task,
            target_solution: s.target_solution,
            ground_truth_target_attempt: s.ground_truth_target_attempt,
            student_profile: s.student_profile,
        }
    }
}

impl Scenario {
    pub fn validate(&self) -> Result<(), ScenarioError> {
        let fail = |problem: String| Err(ScenarioError::Invalid { id: self.id.clone(), problem });
        if !is_solution(&self.ref_solution, &self.ref_task) {
            return fail("ref_solution does not solve ref_task".into());
        }
        if !is_solution(&self.target_solution, &self.target_task) {
            return fail("target_solution does not solve target_task".into());
        }
        let full = BlockSet::full();
        let attempts = [Some(("ref_student_attempt", &self.ref_student_attempt)), self.ground_truth_target_attempt.as_ref().map(|a| ("ground_truth_target_attempt", a))];
        for (name, code) in attempts.into_iter().flatten() {
            let report = validate_blocks(code, &full);
            if !report.valid {
                return fail(format!("{name}: {}", report.violations.join("; ")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("attempt code breaks block constraints: {}", .0.join("; "))]
pub struct InvalidAttempt(pub Vec<String>);

/// A synthesized target-task attempt. Construction validates the code, so an
/// `Attempt` never holds out-of-language blocks.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "AttemptRecord", into = "AttemptRecord")]
pub struct Attempt {
    id: String,
    scenario_id: String,
    method_label: String,
    code: CodeAst,
    retries_used: u32,
    response_digest: String,
    created_at: DateTime<Utc>,
}

#[derive(Serialize, Deserialize)]
struct AttemptRecord {
    id: String,
    scenario_id: String,
    method_label: String,
    code: CodeAst,
    retries_used: u32,
    response_digest: String,
    created_at: DateTime<Utc>,
}

impl TryFrom<AttemptRecord> for Attempt {
    type Error = InvalidAttempt;

    fn try_from(r: AttemptRecord) -> Result<Self, Self::Error> {
        let mut a = Attempt::new(r.scenario_id, r.method_label, r.code, r.retries_used, r.response_digest, r.created_at)?;
        a.id = r.id;
        Ok(a)
    }
}

impl From<Attempt> for AttemptRecord {
    fn from(a: Attempt) -> Self {
        AttemptRecord {
            id: a.id,
            scenario_id: a.scenario_id,
            method_label: a.method_label,
            code: a.code,
            retries_used: a.retries_used,
            response_digest: a.response_digest,
            created_at: a.created_at,
        }
    }
}

/// Opaque attempt id derived from method and scenario.
pub fn attempt_id(method_label: &str, scenario_id: &str) -> String {
    let digest = Sha256::digest(format!("{method_label}\n{scenario_id}").as_bytes());
    format!("att-{}", &hex::encode(digest)[..16])
}

/// Lowercase hex SHA-256 of a raw model response.
pub fn response_digest(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

impl Attempt {
    pub fn new(
        scenario_id: impl Into<String>,
        method_label: impl Into<String>,
        code: CodeAst,
        retries_used: u32,
        response_digest: impl Into<String>,
        created_at: DateTime<Utc>,
    ) -> Result<Self, InvalidAttempt> {
        let report = validate_blocks(&code, &BlockSet::full());
        if !report.valid {
            let mut problems = report.unknown_tokens;
            problems.extend(report.violations);
            return Err(InvalidAttempt(problems));
        }
        let scenario_id = scenario_id.into();
        let method_label = method_label.into();
        Ok(Attempt {
            id: attempt_id(&method_label, &scenario_id),
            scenario_id,
            method_label,
            code,
            retries_used,
            response_digest: response_digest.into(),
            created_at,
        })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn scenario_id(&self) -> &str {
        &self.scenario_id
    }

    pub fn method_label(&self) -> &str {
        &self.method_label
    }

    pub fn code(&self) -> &CodeAst {
        &self.code
    }

    pub fn retries_used(&self) -> u32 {
        self.retries_used
    }

    pub fn response_digest(&self) -> &str {
        &self.response_digest
    }

    pub fn created_at(&self) -> DateTime<Utc> {
        self.created_at
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SynthesisError {
    #[error("no valid attempt after {attempts} queries: {last}")]
    Exhausted { attempts: u32, last: ExtractionError },
    #[error(transparent)]
    Client(#[from] ClientError),
    #[error("max_retries must be positive")]
    ZeroRetries,
}

/// Request settings for [`synthesize_with_retry`].
#[derive(Debug, Clone, PartialEq)]
pub struct SynthesisSettings {
    pub model: String,
    /// Stored on the attempt; defaults to the model name.
    pub method_label: String,
    pub temperature: f64,
    pub max_output_tokens: u32,
    /// Total number of queries allowed per scenario.
    pub max_retries: u32,
}

impl SynthesisSettings {
    pub fn new(model: impl Into<String>) -> Self {
        let model = model.into();
        SynthesisSettings {
            method_label: model.clone(),
            model,
            temperature: DEFAULT_TEMPERATURE,
            max_output_tokens: DEFAULT_MAX_OUTPUT_TOKENS,
            max_retries: 3,
        }
    }
}

/// Queries `client` with the synthesis prompt until a response yields valid
/// code, sending the identical prompt each time. Gives up after
/// `settings.max_retries` queries in total.
pub fn synthesize_with_retry(
    client: &dyn LlmClient,
    scenario: &Scenario,
    settings: &SynthesisSettings,
) -> Result<Attempt, SynthesisError> {
    if settings.max_retries == 0 {
        return Err(SynthesisError::ZeroRetries);
    }
    let prompt = build_synthesis_prompt(scenario);
    let mut last = ExtractionError::NoCodeFound;
    for query in 0..settings.max_retries {
        let request = CompletionRequest {
            model: settings.model.clone(),
            prompt: prompt.clone(),
            temperature: settings.temperature,
            max_output_tokens: settings.max_output_tokens,
            request_tag: format!("{}#{query}", scenario.id),
            sample: query,
        };
        let response = client.complete(&request)?;
        match extract_attempt(&response.text) {
            Ok(code) => {
                return Ok(Attempt::new(
                    &scenario.id,
                    &settings.method_label,
                    code,
                    query,
                    response_digest(&response.text),
                    response.created_at,
                )
                .expect("extracted code is validated"));
            }
            Err(err) => last = err,
        }
    }
    Err(SynthesisError::Exhausted { attempts: settings.max_retries, last })
}
