mod common;

use std::path::PathBuf;
use std::sync::Arc;

use llmss::dsl::gen::{random_ast, AstShape};
use llmss::llm_client::{ScriptEntry, ScriptedClient};
use llmss::prompting::{
    build_expert_prompt, build_synthesis_prompt, extract_attempt, synthesize_with_retry, Attempt, ExtractionError, Scenario,
    SynthesisError, SynthesisSettings, EXPERT_INSTRUCTION, SYNTHESIS_DELIMITERS, TARGET_ATTEMPT,
};
use llmss::{parse_code, print_code};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn golden(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

/// Compares against a checked-in file; `LLMSS_BLESS=1` rewrites it instead.
fn check_golden(name: &str, actual: &str) {
    let path = golden(name);
    if std::env::var_os("LLMSS_BLESS").is_some() {
        std::fs::write(&path, actual).unwrap();
    }
    let expected = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert!(expected == actual, "{name} differs from golden file");
}

#[test]
fn synthesis_prompt_matches_golden() {
    check_golden("synthesis_prompt.txt", &build_synthesis_prompt(&common::fixture_scenario()));
}

#[test]
fn expert_prompt_matches_golden() {
    check_golden("expert_prompt.txt", &build_expert_prompt(&common::target_task()));
}

#[test]
fn synthesis_prompt_structure() {
    let prompt = build_synthesis_prompt(&common::fixture_scenario());
    for d in SYNTHESIS_DELIMITERS {
        assert_eq!(prompt.lines().filter(|l| *l == d).count(), 1, "{d}");
    }
    assert_eq!(prompt.lines().last(), Some(TARGET_ATTEMPT));
    for bold in ["--- Domain background ---", "--- Instructions ---", "--- Student's behavior as context ---", "--- Student’s behavior as context ---", "--- Target task ---"] {
        assert!(!prompt.contains(bold), "{bold}");
    }
    assert!(prompt.contains("the AVATAR can only move between FREE cells and will crash if it tries to go to a WALL cell"));
    assert!(prompt.contains("Observe and explain the student's behavior and misconceptions"));
    assert!(prompt.contains("capturing the student's behavior and misconceptions shown on the reference task"));
    assert!(prompt.contains(common::TARGET_GRID));
    assert_eq!(prompt, build_synthesis_prompt(&common::fixture_scenario()));
}

#[test]
fn expert_prompt_contents() {
    let corridor = llmss::Task::from_ascii("corridor", ">.*", None).unwrap();
    let prompt = build_expert_prompt(&corridor);
    assert!(prompt.contains(EXPERT_INSTRUCTION));
    assert!(prompt.contains(">.*"));
    assert_eq!(
        EXPERT_INSTRUCTION,
        "You are going to act as an expert in this domain and synthesize a solution code for the following task."
    );
}

#[test]
fn scenario_records_round_trip() {
    let s = common::fixture_scenario();
    let line = serde_json::to_string(&s).unwrap();
    let value: serde_json::Value = serde_json::from_str(&line).unwrap();
    assert_eq!(value["ref_task"]["grid"], llmss::print_grid(&s.ref_task));
    assert_eq!(value["ref_solution"], print_code(&s.ref_solution));
    let back: Scenario = serde_json::from_str(&line).unwrap();
    assert_eq!(back, s);
}

#[test]
fn scenario_with_wrong_solution_is_rejected() {
    let mut value = serde_json::to_value(common::fixture_scenario()).unwrap();
    value["target_solution"] = "turn_left".into();
    assert!(serde_json::from_value::<Scenario>(value).is_err());
}

fn scripted(responses: &[&str]) -> Arc<ScriptedClient> {
    Arc::new(ScriptedClient::new(responses.iter().map(|r| ScriptEntry::respond("*", *r)).collect()))
}

#[test]
fn recovers_after_invalid_block_response() {
    let client = scripted(&["```\nfly_up\n```", "```\nmove_forward\nturn_left\n```"]);
    let a = synthesize_with_retry(&*client, &common::fixture_scenario(), &SynthesisSettings::new("stub")).unwrap();
    assert_eq!(a.retries_used(), 1);
    assert_eq!(client.calls(), 2);
    assert_eq!(a.code(), &parse_code("move_forward turn_left").unwrap());
}

#[test]
fn valid_first_response_makes_one_call() {
    let client = scripted(&["move_forward"]);
    let a = synthesize_with_retry(&*client, &common::fixture_scenario(), &SynthesisSettings::new("stub")).unwrap();
    assert_eq!(a.retries_used(), 0);
    assert_eq!(client.calls(), 1);
}

#[test]
fn gives_up_after_max_retries_calls() {
    for max_retries in [1, 3, 5] {
        let client = scripted(&["The student would write:\nmove_forward\nfly_up"]);
        let mut settings = SynthesisSettings::new("stub");
        settings.max_retries = max_retries;
        let err = synthesize_with_retry(&*client, &common::fixture_scenario(), &settings).unwrap_err();
        assert_eq!(
            err,
            SynthesisError::Exhausted { attempts: max_retries, last: ExtractionError::InvalidBlocks(vec!["fly_up".into()]) }
        );
        assert_eq!(client.calls(), max_retries as usize);
    }
}

#[test]
fn retries_reuse_the_identical_prompt() {
    struct Recorder(std::sync::Mutex<Vec<String>>);
    impl llmss::llm_client::LlmClient for Recorder {
        fn complete(
            &self,
            r: &llmss::llm_client::CompletionRequest,
        ) -> Result<llmss::llm_client::CompletionResponse, llmss::llm_client::ClientError> {
            self.0.lock().unwrap().push(r.prompt.clone());
            llmss::llm_client::EchoClient.complete(r)
        }
    }
    let rec = Recorder(Default::default());
    let _ = synthesize_with_retry(&rec, &common::fixture_scenario(), &SynthesisSettings::new("m"));
    let prompts = rec.0.into_inner().unwrap();
    assert_eq!(prompts.len(), 3);
    assert!(prompts.iter().all(|p| *p == prompts[0]));
}

#[test]
fn attempts_reject_invalid_code() {
    let deep = parse_code(&format!("{}move_forward{}", "repeat(2) { ".repeat(9), " }".repeat(9))).unwrap();
    assert!(Attempt::new("s", "m", deep, 0, "d", chrono::DateTime::UNIX_EPOCH).is_err());
    let record = serde_json::json!({
        "id": "x",
        "scenario_id": "s",
        "method_label": "m",
        "code": "move_forward ".repeat(101),
        "retries_used": 0,
        "response_digest": "d",
        "created_at": "1970-01-01T00:00:00Z",
    });
    let bad: Result<Attempt, _> = serde_json::from_value(record);
    assert!(bad.is_err());
}

#[test]
fn printed_code_is_extractable() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let shape = AstShape { max_depth: 4, max_blocks: 30, ..AstShape::default() };
    for _ in 0..2000 {
        let ast = random_ast(&mut rng, shape);
        if ast.is_empty() {
            continue;
        }
        let text = print_code(&ast);
        assert_eq!(extract_attempt(&text).as_ref(), Ok(&ast), "{text}");
        assert_eq!(extract_attempt(&format!("Sure, here it is:\n```\n{text}\n```\nDone.")).as_ref(), Ok(&ast));
    }
}
