use std::fmt;

use serde::{Deserialize, Serialize};

/// Maximum nesting depth of compound blocks.
pub const MAX_DEPTH: usize = 8;
/// Maximum number of blocks (all nodes, compound ones included) in one program.
pub const MAX_BLOCKS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Condition {
    PathAhead,
    PathLeft,
    PathRight,
}

impl Condition {
    pub const ALL: [Condition; 3] = [Condition::PathAhead, Condition::PathLeft, Condition::PathRight];

    pub fn keyword(self) -> &'static str {
        match self {
            Condition::PathAhead => "path_ahead",
            Condition::PathLeft => "path_left",
            Condition::PathRight => "path_right",
        }
    }

    pub fn from_keyword(word: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.keyword() == word)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Block {
    MoveForward,
    TurnLeft,
    TurnRight,
    Repeat {
        count: u32,
        body: Vec<Block>,
    },
    RepeatUntilGoal {
        body: Vec<Block>,
    },
    /// `else_branch: None` means there is no else clause; `Some` must be non-empty.
    IfElse {
        condition: Condition,
        then_branch: Vec<Block>,
        else_branch: Option<Vec<Block>>,
    },
}

/// The kind of a block, without its children.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BlockKind {
    MoveForward,
    TurnLeft,
    TurnRight,
    Repeat,
    RepeatUntilGoal,
    IfElse,
}

impl BlockKind {
    pub const ALL: [BlockKind; 6] = [
        BlockKind::MoveForward,
        BlockKind::TurnLeft,
        BlockKind::TurnRight,
        BlockKind::Repeat,
        BlockKind::RepeatUntilGoal,
        BlockKind::IfElse,
    ];

    /// The leading keyword of the block in the text syntax.
    pub fn keyword(self) -> &'static str {
        match self {
            BlockKind::MoveForward => "move_forward",
            BlockKind::TurnLeft => "turn_left",
            BlockKind::TurnRight => "turn_right",
            BlockKind::Repeat => "repeat",
            BlockKind::RepeatUntilGoal => "repeat_until_goal",
            BlockKind::IfElse => "if",
        }
    }

    pub fn is_loop(self) -> bool {
        matches!(self, BlockKind::Repeat | BlockKind::RepeatUntilGoal)
    }

    fn bit(self) -> u8 {
        1 << (self as u8)
    }
}

/// A set of block kinds, used to restrict which blocks a task allows.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct BlockSet(u8);

impl BlockSet {
    pub const fn empty() -> Self {
        BlockSet(0)
    }

    pub fn full() -> Self {
        BlockKind::ALL.into_iter().collect()
    }

    pub fn insert(&mut self, kind: BlockKind) {
        self.0 |= kind.bit();
    }

    pub fn contains(&self, kind: BlockKind) -> bool {
        self.0 & kind.bit() != 0
    }

    pub fn is_empty(&self) -> bool {
        self.0 == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = BlockKind> + '_ {
        BlockKind::ALL.into_iter().filter(|k| self.contains(*k))
    }
}

impl Default for BlockSet {
    fn default() -> Self {
        Self::full()
    }
}

impl FromIterator<BlockKind> for BlockSet {
    fn from_iter<I: IntoIterator<Item = BlockKind>>(iter: I) -> Self {
        let mut set = BlockSet::empty();
        for kind in iter {
            set.insert(kind);
        }
        set
    }
}

impl fmt::Debug for BlockSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl Block {
    pub fn kind(&self) -> BlockKind {
        match self {
            Block::MoveForward => BlockKind::MoveForward,
            Block::TurnLeft => BlockKind::TurnLeft,
            Block::TurnRight => BlockKind::TurnRight,
            Block::Repeat { .. } => BlockKind::Repeat,
            Block::RepeatUntilGoal { .. } => BlockKind::RepeatUntilGoal,
            Block::IfElse { .. } => BlockKind::IfElse,
        }
    }

    pub fn is_atomic(&self) -> bool {
        matches!(self, Block::MoveForward | Block::TurnLeft | Block::TurnRight)
    }

    pub fn repeat(count: u32, body: Vec<Block>) -> Self {
        Block::Repeat { count, body }
    }

    pub fn repeat_until_goal(body: Vec<Block>) -> Self {
        Block::RepeatUntilGoal { body }
    }

    pub fn if_else(condition: Condition, then_branch: Vec<Block>, else_branch: Option<Vec<Block>>) -> Self {
        Block::IfElse { condition, then_branch, else_branch }
    }

    /// Child block lists, in source order.
    pub fn children(&self) -> Vec<&[Block]> {
        match self {
            Block::Repeat { body, .. } | Block::RepeatUntilGoal { body } => vec![body.as_slice()],
            Block::IfElse { then_branch, else_branch, .. } => {
                let mut out = vec![then_branch.as_slice()];
                if let Some(e) = else_branch {
                    out.push(e.as_slice());
                }
                out
            }
            _ => Vec::new(),
        }
    }

    /// Number of nodes in this block's subtree, itself included.
    pub fn size(&self) -> usize {
        1 + self.children().into_iter().map(block_count).sum::<usize>()
    }

    /// Compound nesting depth: 0 for atomic blocks, 1 + deepest child otherwise.
    pub fn depth(&self) -> usize {
        if self.is_atomic() {
            0
        } else {
            1 + self.children().into_iter().map(nesting_depth).max().unwrap_or(0)
        }
    }
}

pub(crate) fn block_count(blocks: &[Block]) -> usize {
    blocks.iter().map(Block::size).sum()
}

pub(crate) fn nesting_depth(blocks: &[Block]) -> usize {
    blocks.iter().map(Block::depth).max().unwrap_or(0)
}

/// A program: an ordered list of top-level blocks.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CodeAst {
    pub blocks: Vec<Block>,
}

impl CodeAst {
    pub fn new(blocks: Vec<Block>) -> Self {
        CodeAst { blocks }
    }

    pub fn block_count(&self) -> usize {
        block_count(&self.blocks)
    }

    pub fn depth(&self) -> usize {
        nesting_depth(&self.blocks)
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Visits every block in pre-order.
    pub fn walk<'a>(&'a self, mut f: impl FnMut(&'a Block)) {
        fn go<'a>(blocks: &'a [Block], f: &mut impl FnMut(&'a Block)) {
            for b in blocks {
                f(b);
                for child in b.children() {
                    go(child, f);
                }
            }
        }
        go(&self.blocks, &mut f);
    }

    pub fn contains_kind(&self, pred: impl Fn(BlockKind) -> bool) -> bool {
        let mut found = false;
        self.walk(|b| found |= pred(b.kind()));
        found
    }

    pub fn loop_count(&self) -> usize {
        let mut n = 0;
        self.walk(|b| {
            if b.kind().is_loop() {
                n += 1
            }
        });
        n
    }
}

impl From<Vec<Block>> for CodeAst {
    fn from(blocks: Vec<Block>) -> Self {
        CodeAst { blocks }
    }
}

impl fmt::Display for CodeAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&super::print_code(self))
    }
}
