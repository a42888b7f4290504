use super::Scenario;
use crate::dsl::print_code;
use crate::world::{print_grid, Task};

const INTRO: &str = "You are working on the visual programming domain of Hour of Code: Maze Challenge from https://code.org/.\n\
In this domain, the following types of coding blocks are available:";

const BLOCK_LIST: &[&str] = &[
    "- move_forward: moves the AVATAR one cell forward in the direction it is facing.",
    "- turn_left: turns the AVATAR 90 degrees to the left without moving.",
    "- turn_right: turns the AVATAR 90 degrees to the right without moving.",
    "- repeat(N) { ... }: runs the enclosed blocks N times.",
    "- repeat_until_goal { ... }: runs the enclosed blocks again and again until the AVATAR reaches the GOAL.",
    "- if (CONDITION) { ... } else { ... }: runs the first enclosed blocks if CONDITION holds and the blocks after else otherwise; the else part is optional. CONDITION is one of path_ahead, path_left, path_right and holds when the cell ahead of, left of, or right of the AVATAR is FREE.",
];

const GRID_LEGEND: &str = "Tasks are shown as text grids: # is a WALL cell, . is a FREE cell, * is the GOAL, and ^ > v < is the AVATAR facing north, east, south or west. Code is written one block per line, with the blocks inside a repeat, repeat_until_goal or if enclosed in braces.";

const CRASH_RULE: &str = "A solution code for a task brings the AVATAR to the GOAL when executed. Note that the AVATAR can only move between FREE cells and will crash if it tries to go to a WALL cell.";

const OBSERVE: &str = "First, I give you below a reference task, its solution code, and an attempt code from a student on the reference task. Observe and explain the student's behavior and misconceptions in the attempt code.";

const ROLE_PLAY: &str = "Second, I give you a target task with its solution code. You are going to play the role of the given student. Synthesize an attempt code that is likely to be written by the same student, i.e., capturing the student's behavior and misconceptions shown on the reference task.";

/// Instruction line of the fine-tuning prompt.
pub const EXPERT_INSTRUCTION: &str =
    "You are going to act as an expert in this domain and synthesize a solution code for the following task.";

pub const REF_GRID: &str = "--- Reference Task 1: Grid ---";
pub const REF_SOLUTION: &str = "--- Reference Task 1: Solution ---";
pub const REF_ATTEMPT: &str = "--- Reference Task 1: Student attempt ---";
pub const TARGET_GRID: &str = "--- Target Task 1: Grid ---";
pub const TARGET_SOLUTION: &str = "--- Target Task 1: Solution ---";
pub const TARGET_ATTEMPT: &str = "--- Target Task 1: Student attempt ---";
pub const EXPERT_GRID: &str = "--- Task: Grid ---";

/// Every delimiter line of the synthesis prompt, in order.
pub const SYNTHESIS_DELIMITERS: [&str; 6] = [REF_GRID, REF_SOLUTION, REF_ATTEMPT, TARGET_GRID, TARGET_SOLUTION, TARGET_ATTEMPT];

/// Domain background shared by both prompts: introduction, block list, grid
/// legend and the crash rule, separated by blank lines.
pub fn domain_background() -> String {
    [INTRO.to_string(), BLOCK_LIST.join("\n"), GRID_LEGEND.to_string(), CRASH_RULE.to_string()].join("\n\n")
}

/// The student-synthesis prompt for one scenario. Sent as a single user message.
pub fn build_synthesis_prompt(scenario: &Scenario) -> String {
    let sections = [
        domain_background(),
        OBSERVE.to_string(),
        ROLE_PLAY.to_string(),
        format!("{REF_GRID}\n{}", print_grid(&scenario.ref_task)),
        format!("{REF_SOLUTION}\n{}", print_code(&scenario.ref_solution)),
        format!("{REF_ATTEMPT}\n{}", print_code(&scenario.ref_student_attempt)),
        format!("{TARGET_GRID}\n{}", print_grid(&scenario.target_task)),
        format!("{TARGET_SOLUTION}\n{}", print_code(&scenario.target_solution)),
        TARGET_ATTEMPT.to_string(),
    ];
    let mut prompt = sections.join("\n\n");
    prompt.push('\n');
    prompt
}

/// The fine-tuning prompt: background, expert instruction, then the task grid.
pub fn build_expert_prompt(task: &Task) -> String {
    format!("{}\n\n{EXPERT_INSTRUCTION}\n\n{EXPERT_GRID}\n{}\n", domain_background(), print_grid(task))
}
