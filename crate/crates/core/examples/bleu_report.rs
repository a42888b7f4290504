//! Score attempts with BLEU and turn rubric ratings into a success-rate table.
//!
//!     cargo run -p llmss --example bleu_report

use std::collections::BTreeMap;

use chrono::DateTime;
use llmss::evalharness::{aggregate_success_rates, build_report, code_bleu, Group, Rating};
use llmss::parse_code;
use llmss::prompting::Attempt;

fn main() {
    let truth = parse_code("move_forward move_forward turn_left move_forward").unwrap();
    for guess in ["move_forward move_forward turn_left move_forward", "move_forward turn_left move_forward", "turn_right"] {
        let code = parse_code(guess).unwrap();
        println!("BLEU {:.3}  {guess}", code_bleu(&code, &truth).unwrap());
    }

    let code = parse_code("move_forward").unwrap();
    let mut runs = Vec::new();
    for (run, q_stu_hits) in [(0usize, 16usize), (1, 15), (2, 17)] {
        let attempts: Vec<Attempt> =
            (0..18).map(|i| Attempt::new(format!("r{run}-s{i}"), "method-x", code.clone(), 0, "d", DateTime::UNIX_EPOCH).unwrap()).collect();
        let reference_of: BTreeMap<String, String> = attempts.iter().map(|a| (a.scenario_id().to_string(), "hoc4".to_string())).collect();
        let ratings: Vec<Rating> = attempts
            .iter()
            .enumerate()
            .map(|(i, a)| Rating::new("rater", a.id(), u8::from(i < q_stu_hits), u8::from(i % 5 != 0), DateTime::UNIX_EPOCH).unwrap())
            .collect();
        runs.push(aggregate_success_rates(&ratings, &attempts, &reference_of, &Group::new("hoc4", "method-x")).unwrap());
    }
    println!("\n{}", build_report(&runs).render_table());
}
