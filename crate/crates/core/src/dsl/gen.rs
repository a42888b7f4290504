//! Random program generation for property tests and fuzzing.

use rand::Rng;

use super::{Block, CodeAst, Condition};

/// Shape limits for [`random_ast`].
#[derive(Debug, Clone, Copy)]
pub struct AstShape {
    pub max_depth: usize,
    pub max_blocks: usize,
    pub max_body: usize,
    pub max_repeat: u32,
}

impl Default for AstShape {
    fn default() -> Self {
        AstShape { max_depth: 4, max_blocks: 50, max_body: 5, max_repeat: 9 }
    }
}

/// Draws a program that satisfies every block invariant (counts ≥ 1, present
/// else branches non-empty) within the given depth and block budget.
pub fn random_ast<R: Rng + ?Sized>(rng: &mut R, shape: AstShape) -> CodeAst {
    let mut budget = shape.max_blocks;
    let len = rng.random_range(0..=shape.max_body.max(1) * 2);
    CodeAst::new(random_list(rng, &shape, shape.max_depth, len, &mut budget))
}

fn random_list<R: Rng + ?Sized>(rng: &mut R, shape: &AstShape, depth: usize, len: usize, budget: &mut usize) -> Vec<Block> {
    let mut out = Vec::new();
    for _ in 0..len {
        if *budget == 0 {
            break;
        }
        out.push(random_block(rng, shape, depth, budget));
    }
    out
}

fn random_block<R: Rng + ?Sized>(rng: &mut R, shape: &AstShape, depth: usize, budget: &mut usize) -> Block {
    *budget -= 1;
    let compound = depth > 0 && *budget > 0 && rng.random_bool(0.35);
    if !compound {
        return match rng.random_range(0..3) {
            0 => Block::MoveForward,
            1 => Block::TurnLeft,
            _ => Block::TurnRight,
        };
    }
    let body_len = |rng: &mut R| rng.random_range(0..=shape.max_body);
    match rng.random_range(0..3) {
        0 => {
            let count = rng.random_range(1..=shape.max_repeat);
            let n = body_len(rng);
            Block::repeat(count, random_list(rng, shape, depth - 1, n, budget))
        }
        1 => {
            let n = body_len(rng);
            Block::repeat_until_goal(random_list(rng, shape, depth - 1, n, budget))
        }
        _ => {
            let condition = Condition::ALL[rng.random_range(0..3)];
            let n = body_len(rng);
            let then_branch = random_list(rng, shape, depth - 1, n, budget);
            let else_branch = if rng.random_bool(0.5) && *budget > 0 {
                let n = rng.random_range(1..=shape.max_body.max(1));
                Some(random_list(rng, shape, depth - 1, n, budget)).filter(|b| !b.is_empty())
            } else {
                None
            };
            Block::if_else(condition, then_branch, else_branch)
        }
    }
}
