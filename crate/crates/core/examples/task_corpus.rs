//! Grow a corpus of distinct tasks around a reference task and write
//! fine-tuning records for it.
//!
//!     cargo run -p llmss --example task_corpus

use std::collections::HashSet;

use llmss::reference;
use llmss::synthgen::{emit_finetune_dataset, generate_tasks, CorpusSpec, MutationOp, MutationSpec};
use llmss::world::bfs_shortest_actions;
use llmss::print_grid;

fn main() {
    let seed = reference::hoc18().task;
    let spec = CorpusSpec::new(MutationSpec::new(MutationOp::ALL.to_vec(), (4, 30), 7).unwrap(), "hoc18");
    let tasks = generate_tasks(&seed, &spec, 200).expect("corpus");

    let distinct: HashSet<_> = tasks.iter().map(|t| t.canonical_digest()).collect();
    let lengths: Vec<usize> = tasks.iter().map(|t| bfs_shortest_actions(t).unwrap().len()).collect();
    println!("{} tasks, {} distinct, path lengths {}..={}", tasks.len(), distinct.len(), lengths.iter().min().unwrap(), lengths.iter().max().unwrap());
    println!("\nfirst task ({}):\n{}", tasks[0].id(), print_grid(&tasks[0]));

    let mut out = Vec::new();
    emit_finetune_dataset(&tasks[..2], &mut out).unwrap();
    let first = String::from_utf8(out).unwrap();
    let first = first.lines().next().unwrap();
    println!("\nfine-tuning record: {}...", &first[..first.len().min(160)]);
}
