use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest accepted grid side.
pub const MAX_SIDE: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Heading {
    North,
    East,
    South,
    West,
}

impl Heading {
    pub const ALL: [Heading; 4] = [Heading::North, Heading::East, Heading::South, Heading::West];

    pub fn turn_left(self) -> Self {
        match self {
            Heading::North => Heading::West,
            Heading::West => Heading::South,
            Heading::South => Heading::East,
            Heading::East => Heading::North,
        }
    }

    pub fn turn_right(self) -> Self {
        match self {
            Heading::North => Heading::East,
            Heading::East => Heading::South,
            Heading::South => Heading::West,
            Heading::West => Heading::North,
        }
    }

    /// Row/column delta of one step forward.
    pub fn delta(self) -> (isize, isize) {
        match self {
            Heading::North => (-1, 0),
            Heading::East => (0, 1),
            Heading::South => (1, 0),
            Heading::West => (0, -1),
        }
    }

    pub fn glyph(self) -> char {
        match self {
            Heading::North => '^',
            Heading::East => '>',
            Heading::South => 'v',
            Heading::West => '<',
        }
    }

    pub fn from_glyph(c: char) -> Option<Self> {
        Self::ALL.into_iter().find(|h| h.glyph() == c)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Cell {
    Free,
    Wall,
}

/// Row/column coordinates of a cell, row 0 at the top.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Coord {
    pub row: usize,
    pub col: usize,
}

impl Coord {
    pub const fn new(row: usize, col: usize) -> Self {
        Coord { row, col }
    }
}

impl fmt::Display for Coord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.row, self.col)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Pose {
    pub cell: Coord,
    pub heading: Heading,
}

impl Pose {
    pub const fn new(row: usize, col: usize, heading: Heading) -> Self {
        Pose { cell: Coord::new(row, col), heading }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Grid {
    rows: usize,
    cols: usize,
    cells: Vec<Cell>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GridError {
    #[error("grid is empty")]
    Empty,
    #[error("grid is not rectangular: row {row} has {found} cells, expected {expected}")]
    NotRectangular { row: usize, expected: usize, found: usize },
    #[error("grid is {rows}x{cols}, sides must be between 1 and {MAX_SIDE}")]
    BadSize { rows: usize, cols: usize },
    #[error("unknown character {ch:?} at {at}")]
    UnknownChar { ch: char, at: Coord },
    #[error("expected exactly one avatar, found {0}")]
    AvatarCount(usize),
    #[error("expected exactly one goal, found {0}")]
    GoalCount(usize),
}

impl Grid {
    /// Builds a grid from row-major cells.
    pub fn new(rows: usize, cols: usize, cells: Vec<Cell>) -> Result<Self, GridError> {
        if rows == 0 || cols == 0 || rows > MAX_SIDE || cols > MAX_SIDE {
            return Err(GridError::BadSize { rows, cols });
        }
        if cells.len() != rows * cols {
            return Err(GridError::NotRectangular { row: cells.len() / cols, expected: cols, found: cells.len() % cols });
        }
        Ok(Grid { rows, cols, cells })
    }

    pub fn free(rows: usize, cols: usize) -> Result<Self, GridError> {
        Self::new(rows, cols, vec![Cell::Free; rows * cols])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, at: Coord) -> Option<Cell> {
        (at.row < self.rows && at.col < self.cols).then(|| self.cells[at.row * self.cols + at.col])
    }

    pub fn set(&mut self, at: Coord, cell: Cell) {
        assert!(at.row < self.rows && at.col < self.cols, "{at} outside {}x{} grid", self.rows, self.cols);
        self.cells[at.row * self.cols + at.col] = cell;
    }

    /// True iff `at` is inside the grid and free. Out-of-bounds counts as wall.
    pub fn is_free(&self, at: Coord) -> bool {
        self.get(at) == Some(Cell::Free)
    }

    /// The cell one step from `from` along `heading`, if it is inside the grid.
    pub fn step(&self, from: Coord, heading: Heading) -> Option<Coord> {
        let (dr, dc) = heading.delta();
        let row = from.row.checked_add_signed(dr)?;
        let col = from.col.checked_add_signed(dc)?;
        (row < self.rows && col < self.cols).then_some(Coord::new(row, col))
    }

    /// All coordinates in row-major order.
    pub fn coords(&self) -> impl Iterator<Item = Coord> + '_ {
        (0..self.rows).flat_map(move |r| (0..self.cols).map(move |c| Coord::new(r, c)))
    }

    pub fn free_count(&self) -> usize {
        self.cells.iter().filter(|c| **c == Cell::Free).count()
    }
}

/// Grid plus avatar pose and goal as read from ASCII, before task-level checks.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ParsedGrid {
    pub grid: Grid,
    pub start: Pose,
    pub goal: Coord,
}

/// Reads the ASCII map: `#` wall, `.` free, `*` goal, `^ > v <` avatar facing
/// north/east/south/west. Goal and avatar both sit on free cells.
pub fn parse_grid(ascii: &str) -> Result<ParsedGrid, GridError> {
    let lines: Vec<&str> = ascii.lines().map(|l| l.trim_end()).collect();
    let lines: Vec<&str> = {
        let end = lines.iter().rposition(|l| !l.is_empty()).map_or(0, |i| i + 1);
        lines[..end].to_vec()
    };
    if lines.is_empty() {
        return Err(GridError::Empty);
    }
    let cols = lines[0].chars().count();
    let rows = lines.len();
    if rows > MAX_SIDE || cols == 0 || cols > MAX_SIDE {
        return Err(GridError::BadSize { rows, cols });
    }
    let mut cells = Vec::with_capacity(rows * cols);
    let mut avatars = Vec::new();
    let mut goals = Vec::new();
    for (r, line) in lines.iter().enumerate() {
        let n = line.chars().count();
        if n != cols {
            return Err(GridError::NotRectangular { row: r, expected: cols, found: n });
        }
        for (c, ch) in line.chars().enumerate() {
            let at = Coord::new(r, c);
            let cell = match ch {
                '#' => Cell::Wall,
                '.' => Cell::Free,
                '*' => {
                    goals.push(at);
                    Cell::Free
                }
                _ => match Heading::from_glyph(ch) {
                    Some(h) => {
                        avatars.push(Pose { cell: at, heading: h });
                        Cell::Free
                    }
                    None => return Err(GridError::UnknownChar { ch, at }),
                },
            };
            cells.push(cell);
        }
    }
    if avatars.len() != 1 {
        return Err(GridError::AvatarCount(avatars.len()));
    }
    if goals.len() != 1 {
        return Err(GridError::GoalCount(goals.len()));
    }
    let grid = Grid::new(rows, cols, cells)?;
    Ok(ParsedGrid { grid, start: avatars[0], goal: goals[0] })
}

/// Renders a grid with avatar and goal, rows separated by `\n`, no trailing newline.
pub fn render_grid(grid: &Grid, start: Pose, goal: Coord) -> String {
    let mut out = String::with_capacity(grid.rows() * (grid.cols() + 1));
    for r in 0..grid.rows() {
        if r > 0 {
            out.push('\n');
        }
        for c in 0..grid.cols() {
            let at = Coord::new(r, c);
            let ch = if at == start.cell {
                start.heading.glyph()
            } else if at == goal {
                '*'
            } else if grid.is_free(at) {
                '.'
            } else {
                '#'
            };
            out.push(ch);
        }
    }
    out
}
