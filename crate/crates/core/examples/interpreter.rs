//! Run programs on a maze and find shortest action sequences.
//!
//!     cargo run -p llmss --example interpreter

use llmss::reference;
use llmss::world::{actions_to_code, bfs_shortest_actions, execute, DEFAULT_STEP_LIMIT};
use llmss::{parse_code, print_code, print_grid};

fn main() {
    let r = reference::hoc4();
    println!("{}\n", print_grid(&r.task));

    let result = execute(&r.solution, &r.task, DEFAULT_STEP_LIMIT);
    println!("reference solution: {:?} after {} steps", result.outcome, result.steps_used);
    for step in result.trace.iter().take(5) {
        println!("  {:?} at {:?} facing {:?}", step.action, step.pose.cell, step.pose.heading);
    }

    let wrong = parse_code("move_forward move_forward move_forward").unwrap();
    println!("\n`{}`: {:?}", print_code(&wrong), execute(&wrong, &r.task, DEFAULT_STEP_LIMIT).outcome);

    let shortest = bfs_shortest_actions(&r.task).expect("reachable goal");
    println!("\nshortest sequence ({} actions): {}", shortest.len(), print_code(&actions_to_code(&shortest)));
}
