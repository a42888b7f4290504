//! Maze grids, tasks, program execution and the shortest-path oracle.

mod exec;
pub mod gen;
mod grid;
mod search;
mod task;

pub use exec::{
    actions_to_code, execute, is_solution, Action, ExecutionResult, FailureReason, Machine, Outcome, TraceStep,
    DEFAULT_STEP_LIMIT,
};
pub use grid::{parse_grid, render_grid, Cell, Coord, Grid, GridError, Heading, ParsedGrid, Pose, MAX_SIDE};
pub use search::{bfs_shortest_actions, shortest_actions, Unreachable};
pub use task::{cells_connected, print_grid, Task, TaskError, TaskRecord};
