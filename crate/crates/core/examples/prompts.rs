//! Build the synthesis prompt for a scenario and pull an attempt out of a
//! free-form model response.
//!
//!     cargo run -p llmss --example prompts

use llmss::prompting::{build_synthesis_prompt, extract_attempt, Scenario};
use llmss::reference;
use llmss::synthgen::{apply_misconception, synthesize_solution, Misconception, StudentProfile};
use llmss::{print_code, Task};

fn main() {
    let r = reference::hoc4();
    let student = StudentProfile::new("stu", Misconception::TurnConfusion, vec![]);
    let target = Task::from_ascii("target", "#####\n#>..#\n###.#\n#*..#\n#####", None).unwrap();
    let target_solution = synthesize_solution(&target);
    let scenario = Scenario {
        id: "demo".into(),
        ref_student_attempt: apply_misconception(&r.solution, &student, &r.task).unwrap(),
        ground_truth_target_attempt: apply_misconception(&target_solution, &student, &target).ok(),
        ref_task: r.task,
        ref_solution: r.solution,
        target_task: target,
        target_solution,
        student_profile: Some(student),
    };
    println!("{}", build_synthesis_prompt(&scenario));

    let response = "The student swaps left and right, so:\n```\nmove_forward\nmove_forward\nturn_left\nmove_forward\n```\nThis mirrors the reference attempt.";
    let attempt = extract_attempt(response).expect("code block");
    println!("\nextracted attempt:\n{}", print_code(&attempt));
    println!("\nprose only: {:?}", extract_attempt("I am not sure what the student would do.").unwrap_err());
}
