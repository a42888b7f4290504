//! Built-in reference tasks.
//!
//! These are hand-authored stand-ins for the two Hour of Code maze levels used
//! as reference tasks, not the original level layouts. Each comes with a
//! hand-written solution in which every simulated misconception has a site, so
//! all six default student profiles produce an attempt on it.

use crate::dsl::{parse_code, CodeAst};
use crate::world::Task;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReferenceTask {
    pub task: Task,
    pub solution: CodeAst,
}

pub const HOC4: &str = "hoc4";
pub const HOC18: &str = "hoc18";
pub const NAMES: [&str; 2] = [HOC4, HOC18];

const HOC4_GRID: &str = "######\n#>..##\n###.##\n###..*\n######";
const HOC4_SOLUTION: &str =
    "repeat(2) { move_forward } turn_right repeat_until_goal { if (path_ahead) { move_forward } else { turn_left } }";

const HOC18_GRID: &str = "########\n#>...###\n####.#*#\n#....#.#\n#.####.#\n#......#\n########";
const HOC18_SOLUTION: &str = "repeat(3) { move_forward } turn_right repeat_until_goal { if (path_ahead) { move_forward } else { if (path_right) { turn_right } else { turn_left } } }";

fn build(id: &str, grid: &str, solution: &str) -> ReferenceTask {
    ReferenceTask {
        task: Task::from_ascii(id, grid, None).expect("built-in grid is valid"),
        solution: parse_code(solution).expect("built-in solution parses"),
    }
}

/// Short loop-and-turn maze.
pub fn hoc4() -> ReferenceTask {
    build(HOC4, HOC4_GRID, HOC4_SOLUTION)
}

/// Longer maze solved by wall following with nested conditionals.
pub fn hoc18() -> ReferenceTask {
    build(HOC18, HOC18_GRID, HOC18_SOLUTION)
}

pub fn by_name(name: &str) -> Option<ReferenceTask> {
    match name {
        HOC4 => Some(hoc4()),
        HOC18 => Some(hoc18()),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synthgen::{apply_misconception, StudentProfile};
    use crate::world::is_solution;

    #[test]
    fn solutions_solve_and_every_profile_applies() {
        for name in NAMES {
            let r = by_name(name).unwrap();
            assert!(is_solution(&r.solution, &r.task), "{name}");
            for profile in StudentProfile::default_roster() {
                let attempt = apply_misconception(&r.solution, &profile, &r.task);
                assert!(attempt.is_ok(), "{name} / {}: {attempt:?}", profile.id);
            }
        }
        assert!(by_name("hoc5").is_none());
    }
}
