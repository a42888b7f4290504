//! Rewrite a correct solution the way students with typical misconceptions would.
//!
//!     cargo run -p llmss --example misconceptions

use llmss::reference;
use llmss::synthgen::{apply_misconception, StudentProfile};
use llmss::world::DEFAULT_STEP_LIMIT;
use llmss::{execute, print_code};

fn main() {
    let r = reference::hoc18();
    println!("solution:\n{}\n", print_code(&r.solution));
    for profile in StudentProfile::default_roster() {
        match apply_misconception(&r.solution, &profile, &r.task) {
            Ok(code) => {
                let outcome = execute(&code, &r.task, DEFAULT_STEP_LIMIT).outcome;
                println!("{} ({}): {outcome:?}\n{}\n", profile.id, profile.misconception.name(), print_code(&code));
            }
            Err(e) => println!("{}: {e}\n", profile.id),
        }
    }
}
