use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dsl::{validate_blocks, Block, BlockSet, CodeAst};
use crate::world::{is_solution, Action, Machine, Task, DEFAULT_STEP_LIMIT};

/// Catalog of simulated student misconceptions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Misconception {
    /// Writes every loop out by hand, as many times as it actually runs.
    NoLoop,
    /// Writes loops out by hand but stops one iteration short.
    NoLoopShort,
    /// Mixes up left and right turns.
    TurnConfusion,
    /// Stops before the end: drops the last `params[0]` top-level statements.
    IncompletePath,
    /// Ignores conditions and always does the `if` branch.
    IgnoreConditional,
    /// Miscounts repetitions by `params[0]` (−1 or +1).
    OffByOneRepeat,
}

impl Misconception {
    pub const ALL: [Misconception; 6] = [
        Misconception::NoLoop,
        Misconception::NoLoopShort,
        Misconception::TurnConfusion,
        Misconception::IncompletePath,
        Misconception::IgnoreConditional,
        Misconception::OffByOneRepeat,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Misconception::NoLoop => "no_loop",
            Misconception::NoLoopShort => "no_loop_short",
            Misconception::TurnConfusion => "turn_confusion",
            Misconception::IncompletePath => "incomplete_path",
            Misconception::IgnoreConditional => "ignore_conditional",
            Misconception::OffByOneRepeat => "off_by_one_repeat",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StudentProfile {
    pub id: String,
    pub misconception: Misconception,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub params: Vec<i64>,
}

impl StudentProfile {
    pub fn new(id: impl Into<String>, misconception: Misconception, params: Vec<i64>) -> Self {
        StudentProfile { id: id.into(), misconception, params }
    }

    /// One student per misconception kind.
    pub fn default_roster() -> Vec<StudentProfile> {
        Misconception::ALL
            .into_iter()
            .map(|m| {
                let params = match m {
                    Misconception::IncompletePath | Misconception::OffByOneRepeat => vec![1],
                    _ => Vec::new(),
                };
                StudentProfile::new(format!("stu-{}", m.name()), m, params)
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MisconceptionError {
    #[error("{kind:?} does not apply: {reason}")]
    TransformInapplicable { kind: Misconception, reason: String },
}

fn inapplicable(kind: Misconception, reason: impl Into<String>) -> MisconceptionError {
    MisconceptionError::TransformInapplicable { kind, reason: reason.into() }
}

/// Rewrites a correct solution the way the profiled student would write it.
/// The result always parses and validates against the full block set.
pub fn apply_misconception(solution: &CodeAst, profile: &StudentProfile, task: &Task) -> Result<CodeAst, MisconceptionError> {
    let kind = profile.misconception;
    let param = |default: i64| profile.params.first().copied().unwrap_or(default);
    let out = match kind {
        Misconception::NoLoop | Misconception::NoLoopShort => {
            if solution.loop_count() == 0 {
                return Err(inapplicable(kind, "solution has no loops"));
            }
            let short = kind == Misconception::NoLoopShort;
            let mut machine = Machine::new(task, DEFAULT_STEP_LIMIT);
            let out = CodeAst::new(unroll(&solution.blocks, &mut machine, short));
            if short && is_solution(&out, task) {
                return Err(inapplicable(kind, "the shortened program still solves the task"));
            }
            out
        }
        Misconception::TurnConfusion => {
            if !solution.contains_kind(|k| matches!(k, crate::dsl::BlockKind::TurnLeft | crate::dsl::BlockKind::TurnRight)) {
                return Err(inapplicable(kind, "solution has no turns"));
            }
            CodeAst::new(map_blocks(&solution.blocks, &|b| match b {
                Block::TurnLeft => vec![Block::TurnRight],
                Block::TurnRight => vec![Block::TurnLeft],
                other => vec![other.clone()],
            }))
        }
        Misconception::IncompletePath => {
            let drop = param(1);
            if drop < 1 {
                return Err(inapplicable(kind, format!("truncation count {drop} must be positive")));
            }
            let drop = drop as usize;
            if solution.blocks.len() < drop {
                return Err(inapplicable(kind, format!("solution has fewer than {drop} top-level statements")));
            }
            CodeAst::new(solution.blocks[..solution.blocks.len() - drop].to_vec())
        }
        Misconception::IgnoreConditional => {
            if !solution.contains_kind(|k| k == crate::dsl::BlockKind::IfElse) {
                return Err(inapplicable(kind, "solution has no conditionals"));
            }
            CodeAst::new(map_blocks(&solution.blocks, &|b| match b {
                Block::IfElse { then_branch, .. } => then_branch.clone(),
                other => vec![other.clone()],
            }))
        }
        Misconception::OffByOneRepeat => {
            let delta = param(1);
            if delta != -1 && delta != 1 {
                return Err(inapplicable(kind, format!("offset {delta} must be -1 or +1")));
            }
            if !solution.contains_kind(|k| k == crate::dsl::BlockKind::Repeat) {
                return Err(inapplicable(kind, "solution has no repeat(n) blocks"));
            }
            CodeAst::new(map_blocks(&solution.blocks, &|b| match b {
                // repeat(1) miscounted down runs zero times.
                Block::Repeat { count: 1, .. } if delta < 0 => Vec::new(),
                Block::Repeat { count, body } => vec![Block::Repeat { count: (*count as i64 + delta) as u32, body: body.clone() }],
                other => vec![other.clone()],
            }))
        }
    };
    let report = validate_blocks(&out, &BlockSet::full());
    if !report.valid {
        return Err(inapplicable(kind, report.violations.join("; ")));
    }
    Ok(out)
}

/// Bottom-up rewrite: children are rewritten first, then `f` maps each block to
/// its replacement list.
fn map_blocks(blocks: &[Block], f: &dyn Fn(&Block) -> Vec<Block>) -> Vec<Block> {
    blocks
        .iter()
        .flat_map(|b| {
            let rebuilt = match b {
                Block::Repeat { count, body } => Block::Repeat { count: *count, body: map_blocks(body, f) },
                Block::RepeatUntilGoal { body } => Block::RepeatUntilGoal { body: map_blocks(body, f) },
                Block::IfElse { condition, then_branch, else_branch } => Block::IfElse {
                    condition: *condition,
                    then_branch: map_blocks(then_branch, f),
                    else_branch: else_branch.as_ref().map(|e| map_blocks(e, f)).filter(|e| !e.is_empty()),
                },
                atomic => atomic.clone(),
            };
            f(&rebuilt)
        })
        .collect()
}

/// Replaces every loop by copies of its body, one per iteration the program
/// actually runs, following the execution on `machine`. With `short`, the last
/// executed iteration of each loop is left out. Code the execution never reaches
/// keeps its atomic and conditional blocks and loses its loops.
fn unroll(blocks: &[Block], m: &mut Machine<'_>, short: bool) -> Vec<Block> {
    let mut out = Vec::new();
    for block in blocks {
        if m.halted() {
            out.extend(strip_loops(std::slice::from_ref(block)));
            continue;
        }
        match block {
            Block::MoveForward | Block::TurnLeft | Block::TurnRight => {
                m.act(Action::from_block(block).expect("atomic"));
                out.push(block.clone());
            }
            Block::Repeat { count, body } => {
                let mut iterations = Vec::new();
                for _ in 0..*count {
                    let before = m.steps();
                    iterations.push(unroll(body, m, short));
                    if m.halted() || m.steps() == before {
                        break;
                    }
                }
                emit_iterations(&mut out, iterations, short);
            }
            Block::RepeatUntilGoal { body } => {
                let mut iterations = Vec::new();
                while !m.halted() && !m.at_goal() {
                    let before = m.steps();
                    iterations.push(unroll(body, m, short));
                    if !m.halted() && m.steps() == before {
                        m.stall();
                    }
                }
                emit_iterations(&mut out, iterations, short);
            }
            Block::IfElse { condition, then_branch, else_branch } => {
                let (then_branch, else_branch) = if m.check(*condition) {
                    (unroll(then_branch, m, short), else_branch.as_deref().map(strip_loops))
                } else {
                    (strip_loops(then_branch), else_branch.as_deref().map(|e| unroll(e, m, short)))
                };
                out.push(Block::IfElse {
                    condition: *condition,
                    then_branch,
                    else_branch: else_branch.filter(|e| !e.is_empty()),
                });
            }
        }
    }
    out
}

fn emit_iterations(out: &mut Vec<Block>, mut iterations: Vec<Vec<Block>>, short: bool) {
    if short {
        iterations.pop();
    }
    out.extend(iterations.into_iter().flatten());
}

fn strip_loops(blocks: &[Block]) -> Vec<Block> {
    blocks
        .iter()
        .filter_map(|b| match b {
            Block::Repeat { .. } | Block::RepeatUntilGoal { .. } => None,
            Block::IfElse { condition, then_branch, else_branch } => Some(Block::IfElse {
                condition: *condition,
                then_branch: strip_loops(then_branch),
                else_branch: else_branch.as_deref().map(strip_loops).filter(|e| !e.is_empty()),
            }),
            atomic => Some(atomic.clone()),
        })
        .collect()
}
