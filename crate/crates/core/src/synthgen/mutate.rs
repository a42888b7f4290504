use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::SynthgenError;
use crate::world::{shortest_actions, Cell, Coord, Grid, Heading, Pose, Task};

/// Redraw budget per mutated task.
pub const MAX_CANDIDATES: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MutationOp {
    ToggleWall,
    MoveGoal,
    MoveAvatar,
    Rotate90,
    MirrorHorizontal,
}

impl MutationOp {
    pub const ALL: [MutationOp; 5] =
        [MutationOp::ToggleWall, MutationOp::MoveGoal, MutationOp::MoveAvatar, MutationOp::Rotate90, MutationOp::MirrorHorizontal];
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MutationSpec {
    pub ops: Vec<MutationOp>,
    /// Inclusive bounds on the shortest action-sequence length of outputs.
    pub path_length_bounds: (usize, usize),
    pub rng_seed: u64,
}

impl MutationSpec {
    pub fn new(ops: Vec<MutationOp>, path_length_bounds: (usize, usize), rng_seed: u64) -> Result<Self, SynthgenError> {
        let spec = MutationSpec { ops, path_length_bounds, rng_seed };
        spec.check()?;
        Ok(spec)
    }

    pub fn check(&self) -> Result<(), SynthgenError> {
        let (min, max) = self.path_length_bounds;
        if self.ops.is_empty() {
            return Err(SynthgenError::InvalidSpec("no mutation ops".into()));
        }
        if min < 1 || max < min {
            return Err(SynthgenError::InvalidSpec(format!("bad path length bounds ({min}, {max})")));
        }
        Ok(())
    }

    /// Independent random stream for one `(rng_seed, index)` pair.
    pub fn rng(&self, index: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.rng_seed);
        rng.set_stream(index);
        rng
    }
}

struct Layout {
    grid: Grid,
    start: Pose,
    goal: Coord,
}

fn candidates(seed: &Task, op: MutationOp) -> Vec<Layout> {
    let grid = seed.grid();
    let start = seed.start();
    let goal = seed.goal();
    match op {
        MutationOp::ToggleWall => grid
            .coords()
            .filter(|at| *at != start.cell && *at != goal)
            .map(|at| {
                let mut g = grid.clone();
                g.set(at, if grid.is_free(at) { Cell::Wall } else { Cell::Free });
                Layout { grid: g, start, goal }
            })
            .collect(),
        MutationOp::MoveGoal => grid
            .coords()
            .filter(|at| grid.is_free(*at) && *at != start.cell && *at != goal)
            .map(|at| Layout { grid: grid.clone(), start, goal: at })
            .collect(),
        MutationOp::MoveAvatar => grid
            .coords()
            .filter(|at| grid.is_free(*at) && *at != goal)
            .flat_map(|at| Heading::ALL.into_iter().map(move |h| Pose { cell: at, heading: h }))
            .filter(|pose| *pose != start)
            .map(|pose| Layout { grid: grid.clone(), start: pose, goal })
            .collect(),
        MutationOp::Rotate90 => vec![rotate_clockwise(grid, start, goal)],
        MutationOp::MirrorHorizontal => vec![mirror(grid, start, goal)],
    }
}

fn rotate_clockwise(grid: &Grid, start: Pose, goal: Coord) -> Layout {
    let (rows, cols) = (grid.rows(), grid.cols());
    let map = |at: Coord| Coord::new(at.col, rows - 1 - at.row);
    let mut out = Grid::free(cols, rows).expect("rotation keeps sides within limits");
    for at in grid.coords() {
        if !grid.is_free(at) {
            out.set(map(at), Cell::Wall);
        }
    }
    Layout { grid: out, start: Pose { cell: map(start.cell), heading: start.heading.turn_right() }, goal: map(goal) }
}

fn mirror(grid: &Grid, start: Pose, goal: Coord) -> Layout {
    let cols = grid.cols();
    let map = |at: Coord| Coord::new(at.row, cols - 1 - at.col);
    let mut out = Grid::free(grid.rows(), cols).expect("same size");
    for at in grid.coords() {
        if !grid.is_free(at) {
            out.set(map(at), Cell::Wall);
        }
    }
    let heading = match start.heading {
        Heading::East => Heading::West,
        Heading::West => Heading::East,
        h => h,
    };
    Layout { grid: out, start: Pose { cell: map(start.cell), heading }, goal: map(goal) }
}

/// Derives one task from `seed` by a single mutation. The op and the candidate
/// (enumerated in row-major order) are drawn from the `(rng_seed, index)` stream;
/// candidates that break a task invariant, fall outside the path-length bounds
/// or reproduce the seed layout are redrawn.
pub fn mutate_task(seed: &Task, spec: &MutationSpec, index: u64) -> Result<Task, SynthgenError> {
    spec.check()?;
    let mut rng = spec.rng(index);
    let seed_text = seed.canonical_text();
    let (min, max) = spec.path_length_bounds;
    for _ in 0..MAX_CANDIDATES {
        let op = spec.ops[rng.random_range(0..spec.ops.len())];
        let mut options = candidates(seed, op);
        if options.is_empty() {
            continue;
        }
        let pick = rng.random_range(0..options.len());
        let Layout { grid, start, goal } = options.swap_remove(pick);
        let len = match shortest_actions(&grid, start, goal) {
            Ok(actions) => actions.len(),
            Err(_) => continue,
        };
        if len < min || len > max {
            continue;
        }
        let Ok(task) = Task::new(format!("{}-m{index}", seed.id()), grid, start, goal, None) else {
            continue;
        };
        if task.canonical_text() != seed_text {
            return Ok(task);
        }
    }
    Err(SynthgenError::GenerationExhausted { index, tries: MAX_CANDIDATES })
}

/// Settings for growing a corpus of distinct tasks around one seed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusSpec {
    pub mutation: MutationSpec,
    /// Each corpus task is reached by 1..=max_chain single mutations from the seed.
    pub max_chain: usize,
    pub id_prefix: String,
}

impl CorpusSpec {
    pub fn new(mutation: MutationSpec, id_prefix: impl Into<String>) -> Self {
        CorpusSpec { mutation, max_chain: 6, id_prefix: id_prefix.into() }
    }
}

/// The candidate corpus task for one index: a chain of single mutations whose
/// length and steps all come from the `(seed, index)` streams. Independent of
/// every other index, so indices can be evaluated in parallel.
pub fn derive_task(seed: &Task, spec: &CorpusSpec, index: u64) -> Result<Task, SynthgenError> {
    let depth = spec.mutation.rng(index).random_range(1..=spec.max_chain.max(1));
    let mut task = seed.clone();
    for step in 0..depth {
        let stream = index.wrapping_mul(64).wrapping_add(step as u64 + 1);
        task = mutate_task(&task, &spec.mutation, stream)?;
    }
    Ok(task)
}

const BATCH: usize = 256;

/// Generates `count` tasks that are pairwise distinct and distinct from the
/// seed under canonical layout text. Output order is index order, so parallel
/// evaluation gives the same sequence as a serial run.
pub fn generate_tasks(seed: &Task, spec: &CorpusSpec, count: usize) -> Result<Vec<Task>, SynthgenError> {
    spec.mutation.check()?;
    let mut seen: HashSet<String> = HashSet::from([seed.canonical_text()]);
    let mut out = Vec::with_capacity(count);
    let index_cap = (count as u64).saturating_mul(50).saturating_add(10_000);
    let mut next: u64 = 0;
    while out.len() < count {
        if next >= index_cap {
            return Err(SynthgenError::GenerationExhausted { index: next, tries: out.len() });
        }
        let batch: Vec<(u64, Result<Task, SynthgenError>)> =
            (next..next + BATCH as u64).into_par_iter().map(|i| (i, derive_task(seed, spec, i))).collect();
        next += BATCH as u64;
        for (_, task) in batch {
            let Ok(task) = task else { continue };
            if out.len() == count {
                break;
            }
            if seen.insert(task.canonical_text()) {
                let id = format!("{}-{:06}", spec.id_prefix, out.len());
                out.push(task.with_id(id));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::world::{bfs_shortest_actions, print_grid};

    fn corridor() -> Task {
        Task::from_ascii("corridor", ">.*", None).unwrap()
    }

    #[test]
    fn move_goal_on_corridor_has_one_candidate() {
        let spec = MutationSpec::new(vec![MutationOp::MoveGoal], (1, 10), 7).unwrap();
        for index in 0..5 {
            let t = mutate_task(&corridor(), &spec, index).unwrap();
            assert_eq!(print_grid(&t), ">*.");
        }
    }

    #[test]
    fn rotate_corridor() {
        let spec = MutationSpec::new(vec![MutationOp::Rotate90], (1, 10), 0).unwrap();
        let t = mutate_task(&corridor(), &spec, 0).unwrap();
        assert_eq!(print_grid(&t), "v\n.\n*");
    }

    #[test]
    fn mirror_l_bend() {
        let seed = Task::from_ascii("l", ">#\n.*", None).unwrap();
        let spec = MutationSpec::new(vec![MutationOp::MirrorHorizontal], (1, 10), 0).unwrap();
        assert_eq!(print_grid(&mutate_task(&seed, &spec, 3).unwrap()), "#<\n*.");
    }

    #[test]
    fn exhausted_when_bounds_unreachable() {
        let spec = MutationSpec::new(vec![MutationOp::MoveGoal], (5, 9), 1).unwrap();
        assert!(matches!(mutate_task(&corridor(), &spec, 0), Err(SynthgenError::GenerationExhausted { .. })));
    }

    #[test]
    fn invalid_specs() {
        assert!(MutationSpec::new(vec![], (1, 2), 0).is_err());
        assert!(MutationSpec::new(vec![MutationOp::MoveGoal], (0, 2), 0).is_err());
        assert!(MutationSpec::new(vec![MutationOp::MoveGoal], (3, 2), 0).is_err());
    }

    #[test]
    fn outputs_respect_bounds_and_differ_from_seed() {
        let seed = Task::from_ascii("s", "#####\n#>..#\n#.#.#\n#..*#\n#####", None).unwrap();
        let spec = MutationSpec::new(MutationOp::ALL.to_vec(), (2, 8), 42).unwrap();
        for index in 0..200 {
            let t = mutate_task(&seed, &spec, index).unwrap();
            let len = bfs_shortest_actions(&t).unwrap().len();
            assert!((2..=8).contains(&len), "index {index}: length {len}");
            assert_ne!(t.canonical_text(), seed.canonical_text());
            assert_eq!(mutate_task(&seed, &spec, index).unwrap(), t);
        }
    }

    #[test]
    fn corpus_is_unique_and_reproducible() {
        let seed = Task::from_ascii("s", "......\n.>....\n......\n....*.", None).unwrap();
        let spec = CorpusSpec::new(MutationSpec::new(MutationOp::ALL.to_vec(), (1, 12), 5).unwrap(), "c");
        let a = generate_tasks(&seed, &spec, 300).unwrap();
        let b = generate_tasks(&seed, &spec, 300).unwrap();
        assert_eq!(a, b);
        let distinct: HashSet<String> = a.iter().map(Task::canonical_text).collect();
        assert_eq!(distinct.len(), 300);
        assert!(!distinct.contains(&seed.canonical_text()));
        assert_eq!(a[0].id(), "c-000000");
    }
}
