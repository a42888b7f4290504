//! Serve a freshly synthesized demo run to raters on port 8080 (or the first
//! argument) until interrupted.
//!
//!     cargo run -p llmss-raterd --example rater_server -- 8081

use llmss::pipeline::{self, GenTasksArgs, MakeScenariosArgs, RunConfig, SynthesizeArgs};
use raterd::ServerConfig;

#[tokio::main]
async fn main() -> Result<(), Box<dyn std::error::Error>> {
    let port: u16 = std::env::args().nth(1).map(|p| p.parse()).transpose()?.unwrap_or(raterd::DEFAULT_PORT);
    let dir = tempfile::tempdir()?;
    let run = dir.path().join("demo");
    let stub = dir.path().join("stub.jsonl");
    std::fs::write(&stub, "{\"match\":\"*\",\"response\":\"move_forward\\nturn_left\\nmove_forward\"}\n")?;
    let mut cfg = RunConfig::new(&run);
    cfg.stub = Some(stub);
    pipeline::gen_tasks(&cfg, &GenTasksArgs { count: 50, validation: 10, ..Default::default() })?;
    pipeline::make_scenarios(&cfg, &MakeScenariosArgs::default())?;
    for label in ["method-one", "method-two"] {
        pipeline::synthesize(&cfg, &SynthesizeArgs { method_label: Some(label.into()), ..Default::default() })?;
    }

    let listener = tokio::net::TcpListener::bind(("127.0.0.1", port)).await?;
    println!("try: curl http://{}/api/runs/demo/scenarios", listener.local_addr()?);
    let config = ServerConfig { runs: vec![run], blind: true, ui_dir: None };
    raterd::serve(listener, &config, async {
        let _ = tokio::signal::ctrl_c().await;
    })
    .await?;
    Ok(())
}
