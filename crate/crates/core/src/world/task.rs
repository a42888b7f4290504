use std::collections::VecDeque;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use super::grid::{parse_grid, render_grid, Coord, Grid, GridError, ParsedGrid, Pose};

/// A maze task: grid, avatar start pose, goal cell and optional block budget.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "TaskRecord", into = "TaskRecord")]
pub struct Task {
    id: String,
    grid: Grid,
    start: Pose,
    goal: Coord,
    max_blocks: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TaskError {
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error("avatar start {0} is not a free cell")]
    StartBlocked(Coord),
    #[error("goal {0} is not a free cell")]
    GoalBlocked(Coord),
    #[error("avatar starts on the goal")]
    StartOnGoal,
    #[error("goal is not reachable from the avatar")]
    Unreachable,
    #[error("block budget must be positive")]
    ZeroBudget,
}

/// One line of a task corpus file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskRecord {
    pub id: String,
    pub grid: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_blocks: Option<u32>,
}

impl Task {
    pub fn new(id: impl Into<String>, grid: Grid, start: Pose, goal: Coord, max_blocks: Option<u32>) -> Result<Self, TaskError> {
        if !grid.is_free(start.cell) {
            return Err(TaskError::StartBlocked(start.cell));
        }
        if !grid.is_free(goal) {
            return Err(TaskError::GoalBlocked(goal));
        }
        if start.cell == goal {
            return Err(TaskError::StartOnGoal);
        }
        if max_blocks == Some(0) {
            return Err(TaskError::ZeroBudget);
        }
        if !cells_connected(&grid, start.cell, goal) {
            return Err(TaskError::Unreachable);
        }
        Ok(Task { id: id.into(), grid, start, goal, max_blocks })
    }

    pub fn from_parsed(id: impl Into<String>, parsed: ParsedGrid, max_blocks: Option<u32>) -> Result<Self, TaskError> {
        Self::new(id, parsed.grid, parsed.start, parsed.goal, max_blocks)
    }

    pub fn from_ascii(id: impl Into<String>, ascii: &str, max_blocks: Option<u32>) -> Result<Self, TaskError> {
        Self::from_parsed(id, parse_grid(ascii)?, max_blocks)
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn start(&self) -> Pose {
        self.start
    }

    pub fn goal(&self) -> Coord {
        self.goal
    }

    pub fn max_blocks(&self) -> Option<u32> {
        self.max_blocks
    }

    pub fn with_id(mut self, id: impl Into<String>) -> Self {
        self.id = id.into();
        self
    }

    pub fn with_max_blocks(mut self, max_blocks: Option<u32>) -> Result<Self, TaskError> {
        if max_blocks == Some(0) {
            return Err(TaskError::ZeroBudget);
        }
        self.max_blocks = max_blocks;
        Ok(self)
    }

    /// Identity of the maze layout (grid, avatar pose, goal), ignoring id and budget.
    pub fn canonical_text(&self) -> String {
        print_grid(self)
    }

    pub fn canonical_digest(&self) -> String {
        hex::encode(Sha256::digest(self.canonical_text().as_bytes()))
    }
}

/// ASCII rendering of a task; inverse of [`parse_grid`].
pub fn print_grid(task: &Task) -> String {
    render_grid(&task.grid, task.start, task.goal)
}

impl From<Task> for TaskRecord {
    fn from(task: Task) -> Self {
        TaskRecord { grid: print_grid(&task), id: task.id, max_blocks: task.max_blocks }
    }
}

impl TryFrom<TaskRecord> for Task {
    type Error = TaskError;

    fn try_from(rec: TaskRecord) -> Result<Self, Self::Error> {
        Task::from_ascii(rec.id, &rec.grid, rec.max_blocks)
    }
}

/// 4-neighbour reachability over free cells.
pub fn cells_connected(grid: &Grid, from: Coord, to: Coord) -> bool {
    use super::grid::Heading;
    let mut seen = vec![false; grid.rows() * grid.cols()];
    let mut queue = VecDeque::from([from]);
    seen[from.row * grid.cols() + from.col] = true;
    while let Some(at) = queue.pop_front() {
        if at == to {
            return true;
        }
        for h in Heading::ALL {
            if let Some(next) = grid.step(at, h) {
                let idx = next.row * grid.cols() + next.col;
                if grid.is_free(next) && !seen[idx] {
                    seen[idx] = true;
                    queue.push_back(next);
                }
            }
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn print_matches_input() {
        for ascii in [">.*", ">#\n.*", "#.#\n.^.\n*.#"] {
            let task = Task::from_ascii("t", ascii, None).unwrap();
            assert_eq!(print_grid(&task), ascii);
        }
    }

    #[test]
    fn rejects_unreachable_goal() {
        assert_eq!(Task::from_ascii("t", ">#*", None), Err(TaskError::Unreachable));
    }

    #[test]
    fn record_roundtrip_keeps_budget() {
        let task = Task::from_ascii("maze", ">.*", Some(4)).unwrap();
        let json = serde_json::to_string(&task).unwrap();
        assert_eq!(json, r#"{"id":"maze","grid":">.*","max_blocks":4}"#);
        assert_eq!(serde_json::from_str::<Task>(&json).unwrap(), task);
        let plain = Task::from_ascii("maze", ">.*", None).unwrap();
        assert_eq!(serde_json::to_string(&plain).unwrap(), r#"{"id":"maze","grid":">.*"}"#);
    }

    #[test]
    fn digest_ignores_id() {
        let a = Task::from_ascii("a", ">.*", None).unwrap();
        let b = Task::from_ascii("b", ">.*", Some(3)).unwrap();
        assert_eq!(a.canonical_digest(), b.canonical_digest());
        let c = Task::from_ascii("c", "<.*", None).unwrap();
        assert_ne!(a.canonical_digest(), c.canonical_digest());
    }

    #[test]
    fn zero_budget_rejected() {
        assert_eq!(Task::from_ascii("t", ">.*", Some(0)), Err(TaskError::ZeroBudget));
    }
}
