//! Whole pipeline in a temporary run directory with a scripted model.
//!
//!     cargo run -p llmss --example dry_run

use chrono::DateTime;
use llmss::evalharness::{Rating, RatingStore};
use llmss::llm_client::ScriptEntry;
use llmss::pipeline::{self, GenTasksArgs, MakeScenariosArgs, ReportArgs, RunConfig, SynthesizeArgs};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = tempfile::tempdir()?;
    let stub = dir.path().join("stub.jsonl");
    llmss::jsonl::write(&stub, [ScriptEntry::respond("*", "```\nmove_forward\nmove_forward\nturn_right\n```")])?;
    let mut cfg = RunConfig::new(dir.path().join("run"));
    cfg.stub = Some(stub);

    let (train, val) = pipeline::gen_tasks(&cfg, &GenTasksArgs { count: 200, validation: 20, ..Default::default() })?;
    println!("tasks: {train} train, {val} validation");
    let scenarios = pipeline::make_scenarios(&cfg, &MakeScenariosArgs::default())?;
    println!("scenarios: {}", scenarios.len());
    let synth = pipeline::synthesize(&cfg, &SynthesizeArgs::default())?;
    println!("attempts: {} -> {}", synth.attempts.len(), synth.attempts_path.display());
    let scored = pipeline::auto_eval(&cfg)?;
    println!("Q-task proxy passes: {}/{}", scored.iter().filter(|r| r.q_task_proxy).count(), scored.len());

    let store = RatingStore::open(cfg.path(pipeline::RATINGS))?;
    for (i, a) in synth.attempts.iter().enumerate() {
        store.append(&Rating::new("demo-rater", a.id(), u8::from(i % 3 != 0), u8::from(i % 4 != 0), DateTime::UNIX_EPOCH)?)?;
    }
    let report = pipeline::report(&cfg, &ReportArgs::default())?;
    println!("\n{}", report.render_table());
    println!("run directory kept at {}", dir.keep().join("run").display());
    Ok(())
}
