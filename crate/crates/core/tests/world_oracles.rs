//! Shortest-path and solver checks against exhaustive oracles.

use std::collections::{BTreeMap, HashSet};

use llmss::synthgen::synthesize_solution;
use llmss::world::{actions_to_code, execute, shortest_actions, Action, Cell, Coord, Grid, Heading, Pose, DEFAULT_STEP_LIMIT};
use llmss::{is_solution, Task};

fn grid_from_mask(rows: usize, cols: usize, mask: u32) -> Grid {
    let mut g = Grid::free(rows, cols).unwrap();
    for i in 0..rows * cols {
        if mask >> i & 1 == 1 {
            g.set(Coord::new(i / cols, i % cols), Cell::Wall);
        }
    }
    g
}

fn apply(grid: &Grid, pose: Pose, action: Action) -> Option<Pose> {
    match action {
        Action::MoveForward => grid.step(pose.cell, pose.heading).filter(|c| grid.is_free(*c)).map(|cell| Pose { cell, ..pose }),
        Action::TurnLeft => Some(Pose { heading: pose.heading.turn_left(), ..pose }),
        Action::TurnRight => Some(Pose { heading: pose.heading.turn_right(), ..pose }),
    }
}

/// For every cell, the least k such that some k-action program ends there
/// without crashing. Computed from the exact set of poses reachable by all
/// programs of each length.
fn layered_distances(grid: &Grid, start: Pose) -> BTreeMap<Coord, usize> {
    let mut best = BTreeMap::from([(start.cell, 0)]);
    let mut layer: HashSet<Pose> = HashSet::from([start]);
    let cap = 4 * grid.rows() * grid.cols() + 1;
    for k in 1..=cap {
        layer = layer
            .iter()
            .flat_map(|p| Action::ALL.into_iter().filter_map(move |a| apply(grid, *p, a)))
            .collect();
        for p in &layer {
            best.entry(p.cell).or_insert(k);
        }
    }
    best
}

fn check_layout(grid: &Grid, start: Pose) -> usize {
    let oracle = layered_distances(grid, start);
    let mut checked = 0;
    for goal in grid.coords().filter(|c| grid.is_free(*c) && *c != start.cell) {
        let Ok(task) = Task::new("t", grid.clone(), start, goal, None) else {
            assert!(!oracle.contains_key(&goal));
            continue;
        };
        let bfs = shortest_actions(grid, start, goal).unwrap();
        assert_eq!(Some(&bfs.len()), oracle.get(&goal), "{}", llmss::print_grid(&task));
        assert!(is_solution(&actions_to_code(&bfs), &task));
        checked += 1;
    }
    checked
}

#[test]
fn bfs_matches_layered_oracle_on_all_small_grids() {
    let mut tasks = 0;
    for rows in 1..=3 {
        for cols in 1..=3 {
            for mask in 0..1u32 << (rows * cols) {
                let grid = grid_from_mask(rows, cols, mask);
                for cell in grid.coords().filter(|c| grid.is_free(*c)) {
                    for heading in Heading::ALL {
                        tasks += check_layout(&grid, Pose { cell, heading });
                    }
                }
            }
        }
    }
    assert!(tasks > 10_000, "{tasks}");
}

#[test]
fn bfs_matches_layered_oracle_on_every_4x4_wall_pattern() {
    use rayon::prelude::*;
    (0..1u32 << 16).into_par_iter().for_each(|mask| {
        let grid = grid_from_mask(4, 4, mask);
        let first = grid.coords().find(|c| grid.is_free(*c));
        if let Some(cell) = first {
            check_layout(&grid, Pose { cell, heading: Heading::ALL[mask as usize % 4] });
        }
    });
}

fn all_sequences(len: usize) -> impl Iterator<Item = Vec<Action>> {
    (0..3usize.pow(len as u32)).map(move |mut n| {
        (0..len)
            .map(|_| {
                let a = Action::ALL[n % 3];
                n /= 3;
                a
            })
            .collect()
    })
}

/// Literal enumeration of every shorter program on grids with at most six cells.
#[test]
fn no_shorter_program_solves_tiny_grids() {
    for (rows, cols) in [(1, 2), (1, 3), (1, 4), (2, 2), (2, 3), (3, 2)] {
        for mask in 0..1u32 << (rows * cols) {
            let grid = grid_from_mask(rows, cols, mask);
            for start_cell in grid.coords().filter(|c| grid.is_free(*c)) {
                for heading in Heading::ALL {
                    let start = Pose { cell: start_cell, heading };
                    for goal in grid.coords().filter(|c| grid.is_free(*c) && *c != start_cell) {
                        let Ok(task) = Task::new("t", grid.clone(), start, goal, None) else { continue };
                        let best = shortest_actions(&grid, start, goal).unwrap().len();
                        for len in 0..best {
                            for seq in all_sequences(len) {
                                let result = execute(&actions_to_code(&seq), &task, DEFAULT_STEP_LIMIT);
                                assert!(!result.is_success(), "{seq:?} beats BFS on\n{}", llmss::print_grid(&task));
                            }
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn synthesized_solutions_solve_random_tasks() {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
    for i in 0..500 {
        let task = llmss::world::gen::random_task(&mut rng, &format!("r{i}"), 2 + i % 6, 2 + i % 7, 0.3);
        let sol = synthesize_solution(&task);
        assert!(is_solution(&sol, &task), "{}", llmss::print_grid(&task));
    }
}
