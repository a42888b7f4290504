#![allow(dead_code)]

use llmss::prompting::Scenario;
use llmss::reference;
use llmss::synthgen::{apply_misconception, synthesize_solution, Misconception, StudentProfile};
use llmss::Task;

pub const TARGET_GRID: &str = "#####\n#>..#\n###.#\n#*..#\n#####";

pub fn target_task() -> Task {
    Task::from_ascii("fixture-target", TARGET_GRID, None).unwrap()
}

/// hoc4 reference observed through a student who never uses loops.
pub fn fixture_scenario() -> Scenario {
    let r = reference::hoc4();
    let profile = StudentProfile::new("stu-no_loop", Misconception::NoLoop, vec![]);
    let target = target_task();
    let target_solution = synthesize_solution(&target);
    Scenario {
        id: "fixture".into(),
        ref_student_attempt: apply_misconception(&r.solution, &profile, &r.task).unwrap(),
        ref_task: r.task,
        ref_solution: r.solution,
        ground_truth_target_attempt: apply_misconception(&target_solution, &profile, &target).ok(),
        target_task: target,
        target_solution,
        student_profile: Some(profile),
    }
}
