//! Random task generation for property tests and examples.

use rand::Rng;

use super::grid::{Cell, Coord, Grid, Heading, Pose};
use super::task::Task;

/// Draws a solvable task of the given size. Each non-endpoint cell is a wall
/// with probability `wall_prob`; layouts with an unreachable goal are redrawn.
pub fn random_task<R: Rng + ?Sized>(rng: &mut R, id: &str, rows: usize, cols: usize, wall_prob: f64) -> Task {
    assert!(rows * cols >= 2, "a task needs at least two cells");
    loop {
        let mut grid = Grid::free(rows, cols).expect("size within limits");
        for at in (0..rows).flat_map(|r| (0..cols).map(move |c| Coord::new(r, c))) {
            if rng.random_bool(wall_prob) {
                grid.set(at, Cell::Wall);
            }
        }
        let start = Coord::new(rng.random_range(0..rows), rng.random_range(0..cols));
        let goal = Coord::new(rng.random_range(0..rows), rng.random_range(0..cols));
        if start == goal {
            continue;
        }
        grid.set(start, Cell::Free);
        grid.set(goal, Cell::Free);
        let heading = Heading::ALL[rng.random_range(0..4)];
        if let Ok(task) = Task::new(id, grid, Pose { cell: start, heading }, goal, None) {
            return task;
        }
    }
}
