use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use llmss::pipeline::{self, GenTasksArgs, MakeScenariosArgs, ReportArgs, RunConfig, SynthesizeArgs};
use llmss::synthgen::FullScale;

#[derive(Debug, Parser)]
#[command(name = "llmss", version, about = "Synthesize and evaluate student attempts for maze programming tasks")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Global {
    /// Directory holding every input and output of the run.
    #[arg(long, global = true, default_value = "run")]
    run_dir: PathBuf,
    #[arg(long, global = true, default_value = "gpt-4")]
    model: String,
    #[arg(long, global = true, default_value_t = llmss::llm_client::DEFAULT_TEMPERATURE)]
    temperature: f64,
    /// Queries allowed per scenario before giving up.
    #[arg(long, global = true, default_value_t = 3)]
    max_retries: u32,
    /// Provider requests in flight at once.
    #[arg(long, global = true, default_value_t = 4)]
    parallelism: usize,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Scripted responses (JSONL) replacing the live provider.
    #[arg(long, global = true)]
    stub: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Scale {
    Hoc4,
    Hoc18,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Grow training and validation task corpora around reference tasks.
    GenTasks {
        #[arg(long, default_value_t = 1000)]
        count: usize,
        #[arg(long, default_value_t = 100)]
        validation: usize,
        #[arg(long = "reference", default_value = "hoc4")]
        references: Vec<String>,
        /// Emit the full-size corpus of one reference family.
        #[arg(long, value_enum, conflicts_with_all = ["count", "validation", "references"])]
        full_scale: Option<Scale>,
    },
    /// Write expert-prompt fine-tuning records for the task corpora.
    GenFinetune,
    /// Build scenarios from reference tasks, validation targets and student profiles.
    MakeScenarios {
        #[arg(long = "reference", default_value = "hoc4")]
        references: Vec<String>,
        #[arg(long, default_value_t = 3)]
        targets: usize,
        /// Student profiles (JSONL); defaults to one student per misconception.
        #[arg(long)]
        profiles: Option<PathBuf>,
    },
    /// Query the model for one attempt per scenario.
    Synthesize {
        /// Externally authored scenario file, copied into the run.
        #[arg(long)]
        scenarios: Option<PathBuf>,
        /// Label stored on attempts; defaults to the model name.
        #[arg(long)]
        method_label: Option<String>,
    },
    /// Score attempts with BLEU and the Q-task proxy.
    AutoEval,
    /// Serve the run to human raters.
    Serve {
        #[arg(long, default_value_t = raterd::DEFAULT_PORT)]
        port: u16,
        /// Built rater UI served at `/`.
        #[arg(long)]
        ui_dir: Option<PathBuf>,
        /// Show real method labels to raters.
        #[arg(long)]
        no_blind: bool,
        /// Further run directories to serve alongside `--run-dir`.
        #[arg(long = "runs")]
        runs: Vec<PathBuf>,
    },
    /// Aggregate ratings into success rates.
    Report {
        /// Run directories to average over; defaults to `--run-dir`.
        #[arg(long = "runs")]
        runs: Vec<PathBuf>,
    },
}

fn config(g: Global) -> RunConfig {
    RunConfig {
        run_dir: g.run_dir,
        model: g.model,
        temperature: g.temperature,
        max_retries: g.max_retries,
        parallelism: g.parallelism,
        seed: g.seed,
        stub: g.stub,
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let cfg = config(cli.global);
    match cli.command {
        Command::GenTasks { count, validation, references, full_scale } => {
            let args = match full_scale {
                Some(Scale::Hoc4) => GenTasksArgs::full_scale(FullScale::Hoc4),
                Some(Scale::Hoc18) => GenTasksArgs::full_scale(FullScale::Hoc18),
                None => GenTasksArgs { references, count, validation, ..Default::default() },
            };
            let (train, val) = pipeline::gen_tasks(&cfg, &args)?;
            println!("wrote {train} training and {val} validation tasks to {}", cfg.run_dir.display());
        }
        Command::GenFinetune => {
            let (train, val) = pipeline::gen_finetune(&cfg)?;
            println!("wrote {train} training and {val} validation fine-tuning records");
        }
        Command::MakeScenarios { references, targets, profiles } => {
            let scenarios = pipeline::make_scenarios(&cfg, &MakeScenariosArgs { references, targets, profiles })?;
            println!("wrote {} scenarios to {}", scenarios.len(), cfg.path(pipeline::SCENARIOS).display());
        }
        Command::Synthesize { scenarios, method_label } => {
            let s = pipeline::synthesize(&cfg, &SynthesizeArgs { scenarios, method_label })?;
            let retried = s.attempts.iter().filter(|a| a.retries_used() > 0).count();
            println!(
                "wrote {} attempts ({retried} needed retries, {} scenarios failed) to {}",
                s.attempts.len(),
                s.failures.len(),
                s.attempts_path.display()
            );
        }
        Command::AutoEval => {
            let records = pipeline::auto_eval(&cfg)?;
            let passed = records.iter().filter(|r| r.q_task_proxy).count();
            let solved = records.iter().filter(|r| r.solves_target).count();
            println!("scored {} attempts: {passed} pass the Q-task proxy, {solved} solve their target", records.len());
        }
        Command::Serve { port, ui_dir, no_blind, runs } => {
            let mut dirs = vec![cfg.run_dir.clone()];
            dirs.extend(runs);
            let server = raterd::ServerConfig { runs: dirs, blind: !no_blind, ui_dir };
            let rt = tokio::runtime::Runtime::new().context("starting async runtime")?;
            rt.block_on(async {
                let listener = tokio::net::TcpListener::bind(("0.0.0.0", port)).await.with_context(|| format!("binding port {port}"))?;
                println!("serving on http://{}", listener.local_addr()?);
                raterd::serve(listener, &server, async {
                    let _ = tokio::signal::ctrl_c().await;
                })
                .await?;
                anyhow::Ok(())
            })?;
        }
        Command::Report { runs } => {
            let report = pipeline::report(&cfg, &ReportArgs { runs })?;
            print!("{}", report.render_table());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("llmss: {}", format!("{e:#}").replace('\n', " "));
            ExitCode::FAILURE
        }
    }
}
