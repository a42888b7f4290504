use std::collections::VecDeque;

use thiserror::Error;

use super::exec::Action;
use super::grid::{Coord, Grid, Heading, Pose};
use super::task::Task;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("goal is unreachable from the avatar")]
pub struct Unreachable;

fn state_index(grid: &Grid, pose: Pose) -> usize {
    let h = Heading::ALL.iter().position(|x| *x == pose.heading).expect("heading");
    (pose.cell.row * grid.cols() + pose.cell.col) * 4 + h
}

fn apply(grid: &Grid, pose: Pose, action: Action) -> Option<Pose> {
    match action {
        Action::TurnLeft => Some(Pose { heading: pose.heading.turn_left(), ..pose }),
        Action::TurnRight => Some(Pose { heading: pose.heading.turn_right(), ..pose }),
        Action::MoveForward => {
            let next = grid.step(pose.cell, pose.heading).filter(|c| grid.is_free(*c))?;
            Some(Pose { cell: next, ..pose })
        }
    }
}

/// Breadth-first search over (cell, heading) states with unit-cost actions.
/// Actions are expanded in the order move, turn_left, turn_right, so among all
/// shortest sequences the lexicographically smallest one is returned.
pub fn bfs_shortest_actions(task: &Task) -> Result<Vec<Action>, Unreachable> {
    shortest_actions(task.grid(), task.start(), task.goal())
}

/// Same search on a raw layout, which may be unsolvable. Used to vet
/// candidate layouts before they become tasks.
pub fn shortest_actions(grid: &Grid, start: Pose, goal: Coord) -> Result<Vec<Action>, Unreachable> {
    let n = grid.rows() * grid.cols() * 4;
    let mut parent: Vec<Option<(usize, Action)>> = vec![None; n];
    let mut seen = vec![false; n];
    let mut poses = vec![None; n];
    let start_idx = state_index(grid, start);
    seen[start_idx] = true;
    poses[start_idx] = Some(start);
    let mut queue = VecDeque::from([start_idx]);

    while let Some(idx) = queue.pop_front() {
        let pose = poses[idx].expect("queued states have poses");
        if pose.cell == goal {
            let mut actions = Vec::new();
            let mut cur = idx;
            while let Some((prev, action)) = parent[cur] {
                actions.push(action);
                cur = prev;
            }
            actions.reverse();
            return Ok(actions);
        }
        for action in Action::ALL {
            if let Some(next) = apply(grid, pose, action) {
                let j = state_index(grid, next);
                if !seen[j] {
                    seen[j] = true;
                    poses[j] = Some(next);
                    parent[j] = Some((idx, action));
                    queue.push_back(j);
                }
            }
        }
    }
    Err(Unreachable)
}

#[cfg(test)]
mod tests {
    use super::*;
    use Action::*;

    #[test]
    fn corridor() {
        let t = Task::from_ascii("c", ">.*", None).unwrap();
        assert_eq!(bfs_shortest_actions(&t), Ok(vec![MoveForward, MoveForward]));
    }

    #[test]
    fn l_bend() {
        let t = Task::from_ascii("l", ">#\n.*", None).unwrap();
        assert_eq!(bfs_shortest_actions(&t), Ok(vec![TurnRight, MoveForward, TurnLeft, MoveForward]));
    }

    #[test]
    fn boxed_in_avatar() {
        let mut grid = Grid::free(3, 3).unwrap();
        for at in [Coord::new(0, 1), Coord::new(1, 0), Coord::new(1, 1)] {
            grid.set(at, crate::world::Cell::Wall);
        }
        let start = Pose::new(0, 0, Heading::East);
        assert_eq!(shortest_actions(&grid, start, Coord::new(2, 2)), Err(Unreachable));
        assert!(Task::new("b", grid, start, Coord::new(2, 2), None).is_err());
    }

    #[test]
    fn facing_away_prefers_left_turns_on_ties() {
        // Goal behind: turn_left twice and turn_right twice are equally short.
        let t = Task::from_ascii("b", "*>", None).unwrap();
        assert_eq!(bfs_shortest_actions(&t), Ok(vec![TurnLeft, TurnLeft, MoveForward]));
    }
}
