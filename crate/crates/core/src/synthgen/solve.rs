use crate::dsl::{print_code, Block, CodeAst};
use crate::world::{actions_to_code, bfs_shortest_actions, is_solution, Action, Task};

/// Longest loop body tried for `repeat_until_goal` and `repeat` rolls.
pub const MAX_LOOP_BODY: usize = 4;

/// Preference among equally small candidates: loops first, flat last.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Form {
    UntilGoal,
    Repeat,
    Flat,
}

/// Ground-truth solution for a task: the smallest of the flat shortest action
/// sequence, `repeat_until_goal` over one of its first four prefixes, and the
/// best `repeat(k)` roll of it. Ties prefer `repeat_until_goal`, then `repeat`,
/// then the lexicographically smaller canonical text.
///
/// If no candidate fits the task's block budget the flat sequence is returned.
pub fn synthesize_solution(task: &Task) -> CodeAst {
    let actions = bfs_shortest_actions(task).expect("valid tasks are solvable");
    let flat = actions_to_code(&actions);

    let mut candidates = vec![(flat.clone(), Form::Flat)];
    for k in 1..=MAX_LOOP_BODY.min(actions.len()) {
        let body = actions_to_code(&actions[..k]).blocks;
        candidates.push((CodeAst::new(vec![Block::repeat_until_goal(body)]), Form::UntilGoal));
    }
    let rolled = roll_repeats(&actions);
    if rolled.blocks.iter().any(|b| matches!(b, Block::Repeat { .. })) {
        candidates.push((rolled, Form::Repeat));
    }

    candidates
        .into_iter()
        .filter(|(code, _)| is_solution(code, task))
        .map(|(code, form)| (code.block_count(), form, print_code(&code), code))
        .min_by(|a, b| (a.0, a.1, &a.2).cmp(&(b.0, b.1, &b.2)))
        .map(|(_, _, _, code)| code)
        .unwrap_or(flat)
}

/// Minimum-block encoding of an action sequence where runs of a body of up to
/// four actions repeated `k >= 2` times become `repeat(k) { body }`. On equal
/// cost a repeat is preferred over spelling the actions out.
pub fn roll_repeats(actions: &[Action]) -> CodeAst {
    let n = actions.len();
    // best[i] = (blocks needed for actions[i..], chosen (body_len, count)) with count 1 meaning flat.
    let mut best: Vec<(usize, usize, usize)> = vec![(0, 0, 0); n + 1];
    for i in (0..n).rev() {
        let mut choice: Option<(usize, usize, usize)> = None;
        for len in 1..=MAX_LOOP_BODY.min(n - i) {
            let body = &actions[i..i + len];
            let mut reps = 1;
            while i + (reps + 1) * len <= n && &actions[i + reps * len..i + (reps + 1) * len] == body {
                reps += 1;
            }
            for k in (2..=reps).rev() {
                let cost = 1 + len + best[i + k * len].0;
                if choice.is_none_or(|c| cost < c.0) {
                    choice = Some((cost, len, k));
                }
            }
        }
        let flat_cost = 1 + best[i + 1].0;
        best[i] = match choice {
            Some(c) if c.0 <= flat_cost => c,
            _ => (flat_cost, 1, 1),
        };
    }

    let mut blocks = Vec::new();
    let mut i = 0;
    while i < n {
        let (_, len, k) = best[i];
        if k == 1 {
            blocks.push(actions[i].block());
            i += 1;
        } else {
            blocks.push(Block::repeat(k as u32, actions_to_code(&actions[i..i + len]).blocks));
            i += len * k;
        }
    }
    CodeAst::new(blocks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse_code;
    use Action::*;

    #[test]
    fn corridor_prefers_loop_on_tie() {
        let t = Task::from_ascii("c", ">.*", None).unwrap();
        assert_eq!(synthesize_solution(&t), parse_code("repeat_until_goal { move_forward }").unwrap());
    }

    #[test]
    fn l_bend_stays_flat() {
        let t = Task::from_ascii("l", ">#\n.*", None).unwrap();
        assert_eq!(synthesize_solution(&t), parse_code("turn_right move_forward turn_left move_forward").unwrap());
    }

    #[test]
    fn staircase_uses_until_goal_body() {
        let t = Task::from_ascii("s", ">.##\n#..#\n##.*", None).unwrap();
        let sol = synthesize_solution(&t);
        assert!(is_solution(&sol, &t));
        assert_eq!(
            sol,
            parse_code("repeat_until_goal { move_forward turn_right move_forward turn_left }").unwrap()
        );
    }

    #[test]
    fn rolls_runs() {
        let rolled = roll_repeats(&[MoveForward, MoveForward, MoveForward, TurnLeft, MoveForward, TurnLeft, MoveForward]);
        assert_eq!(rolled, parse_code("repeat(3) { move_forward } repeat(2) { turn_left move_forward }").unwrap());
        assert_eq!(roll_repeats(&[TurnLeft, MoveForward]), parse_code("turn_left move_forward").unwrap());
        assert_eq!(roll_repeats(&[]), CodeAst::default());
    }

    #[test]
    fn prefers_repeat_over_flat_and_respects_budget() {
        // Four moves east, a turn and one move: no until-goal body reaches the goal.
        let t = Task::from_ascii("r", ">....#\n####*#", None).unwrap();
        let sol = synthesize_solution(&t);
        assert_eq!(sol, parse_code("repeat(4) { move_forward } turn_right move_forward").unwrap());
        let budget = t.clone().with_max_blocks(Some(5)).unwrap();
        assert!(is_solution(&synthesize_solution(&budget), &budget));
    }
}
