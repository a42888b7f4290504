//! Synthesize attempts through a scripted client with an on-disk cache, so a
//! rerun never reaches the provider.
//!
//!     cargo run -p llmss --example stub_client

use std::sync::Arc;

use llmss::llm_client::{CachedClient, LlmClient, ResponseCache, ScriptEntry, ScriptedClient};
use llmss::prompting::{synthesize_with_retry, Scenario, SynthesisSettings};
use llmss::{print_code, reference};
use llmss::synthgen::{apply_misconception, Misconception, StudentProfile};

fn scenario() -> Scenario {
    let a = reference::hoc4();
    let b = reference::hoc18();
    let student = StudentProfile::new("stu", Misconception::NoLoop, vec![]);
    Scenario {
        id: "hoc4-to-hoc18".into(),
        ref_student_attempt: apply_misconception(&a.solution, &student, &a.task).unwrap(),
        ground_truth_target_attempt: apply_misconception(&b.solution, &student, &b.task).ok(),
        ref_task: a.task,
        ref_solution: a.solution,
        target_task: b.task,
        target_solution: b.solution,
        student_profile: Some(student),
    }
}

fn main() {
    let dir = tempfile::tempdir().unwrap();
    let stub = Arc::new(ScriptedClient::new(vec![
        ScriptEntry::respond("*", "```\nmove_forward\nclimb\n```"),
        ScriptEntry::respond("*", "```\nmove_forward\nmove_forward\nmove_forward\nturn_right\nmove_forward\n```"),
    ]));
    let settings = SynthesisSettings::new("scripted");
    let s = scenario();

    for round in 1..=2 {
        let client = CachedClient::new(stub.clone(), ResponseCache::open(dir.path()).unwrap());
        let attempt = synthesize_with_retry(&client as &dyn LlmClient, &s, &settings).unwrap();
        println!(
            "round {round}: {} (retries {}, provider calls so far {})\n{}\n",
            attempt.id(),
            attempt.retries_used(),
            stub.calls(),
            print_code(attempt.code())
        );
    }
}
