//! Compress a shortest action sequence into a program with loops.
//!
//!     cargo run -p llmss --example solution_synthesis

use llmss::synthgen::synthesize_solution;
use llmss::world::{actions_to_code, bfs_shortest_actions};
use llmss::{is_solution, print_code, print_grid, Task};

fn main() {
    let task = Task::from_ascii(
        "spiral",
        "#########\n#>......#\n#######.#\n#*......#\n#########",
        None,
    )
    .unwrap();
    println!("{}\n", print_grid(&task));
    let flat = actions_to_code(&bfs_shortest_actions(&task).unwrap());
    let rolled = synthesize_solution(&task);
    println!("shortest sequence: {} blocks\n{}\n", flat.block_count(), print_code(&flat));
    println!("synthesized: {} blocks\n{}", rolled.block_count(), print_code(&rolled));
    assert!(is_solution(&rolled, &task));
}
