use serde::{Deserialize, Serialize};

use super::grid::{Coord, Pose};
use super::task::Task;
use crate::dsl::{Block, CodeAst, Condition};

pub const DEFAULT_STEP_LIMIT: usize = 1000;

/// An atomic block: the only blocks that move the avatar and cost a step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Action {
    MoveForward,
    TurnLeft,
    TurnRight,
}

impl Action {
    /// Fixed tie-break order used by the shortest-path search.
    pub const ALL: [Action; 3] = [Action::MoveForward, Action::TurnLeft, Action::TurnRight];

    pub fn block(self) -> Block {
        match self {
            Action::MoveForward => Block::MoveForward,
            Action::TurnLeft => Block::TurnLeft,
            Action::TurnRight => Block::TurnRight,
        }
    }

    pub fn from_block(block: &Block) -> Option<Self> {
        match block {
            Block::MoveForward => Some(Action::MoveForward),
            Block::TurnLeft => Some(Action::TurnLeft),
            Block::TurnRight => Some(Action::TurnRight),
            _ => None,
        }
    }
}

/// A flat program of atomic blocks.
pub fn actions_to_code(actions: &[Action]) -> CodeAst {
    CodeAst::new(actions.iter().map(|a| a.block()).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FailureReason {
    GoalNotReached,
    StepLimit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Outcome {
    Success,
    /// `position` is the cell the avatar was on when the move was attempted;
    /// `step` is the 1-based number of the crashing move.
    Crash { position: Coord, step: usize },
    Failure(FailureReason),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceStep {
    /// Pose before the action ran.
    pub pose: Pose,
    pub action: Action,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExecutionResult {
    pub outcome: Outcome,
    pub steps_used: usize,
    pub trace: Vec<TraceStep>,
}

impl ExecutionResult {
    pub fn is_success(&self) -> bool {
        self.outcome == Outcome::Success
    }
}

/// Low-level avatar state machine shared by the interpreter and by program
/// transforms that need to follow an execution.
#[derive(Debug, Clone)]
pub struct Machine<'t> {
    task: &'t Task,
    pose: Pose,
    steps: usize,
    limit: usize,
    trace: Vec<TraceStep>,
    halted: Option<Outcome>,
}

impl<'t> Machine<'t> {
    pub fn new(task: &'t Task, step_limit: usize) -> Self {
        Machine { task, pose: task.start(), steps: 0, limit: step_limit, trace: Vec::new(), halted: None }
    }

    pub fn pose(&self) -> Pose {
        self.pose
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn halted(&self) -> bool {
        self.halted.is_some()
    }

    pub fn at_goal(&self) -> bool {
        self.pose.cell == self.task.goal()
    }

    pub fn check(&self, condition: Condition) -> bool {
        let heading = match condition {
            Condition::PathAhead => self.pose.heading,
            Condition::PathLeft => self.pose.heading.turn_left(),
            Condition::PathRight => self.pose.heading.turn_right(),
        };
        let grid = self.task.grid();
        grid.step(self.pose.cell, heading).is_some_and(|c| grid.is_free(c))
    }

    /// Runs one atomic action. Returns false once the machine has halted.
    pub fn act(&mut self, action: Action) -> bool {
        if self.halted.is_some() {
            return false;
        }
        if self.steps >= self.limit {
            self.halted = Some(Outcome::Failure(FailureReason::StepLimit));
            return false;
        }
        self.steps += 1;
        self.trace.push(TraceStep { pose: self.pose, action });
        match action {
            Action::TurnLeft => self.pose.heading = self.pose.heading.turn_left(),
            Action::TurnRight => self.pose.heading = self.pose.heading.turn_right(),
            Action::MoveForward => {
                let grid = self.task.grid();
                match grid.step(self.pose.cell, self.pose.heading).filter(|c| grid.is_free(*c)) {
                    Some(next) => {
                        self.pose.cell = next;
                        if self.at_goal() {
                            self.halted = Some(Outcome::Success);
                        }
                    }
                    None => self.halted = Some(Outcome::Crash { position: self.pose.cell, step: self.steps }),
                }
            }
        }
        self.halted.is_none()
    }

    /// Marks a loop that can make no further progress; it would spin until the step limit.
    pub fn stall(&mut self) {
        if self.halted.is_none() {
            self.halted = Some(Outcome::Failure(FailureReason::StepLimit));
        }
    }

    pub fn finish(self) -> ExecutionResult {
        let outcome = self.halted.unwrap_or(if self.pose.cell == self.task.goal() {
            Outcome::Success
        } else {
            Outcome::Failure(FailureReason::GoalNotReached)
        });
        ExecutionResult { outcome, steps_used: self.steps, trace: self.trace }
    }
}

/// Runs a program on a task. Execution halts as soon as the avatar reaches the
/// goal, crashes into a wall or the border, or uses up `step_limit` atomic steps.
pub fn execute(ast: &CodeAst, task: &Task, step_limit: usize) -> ExecutionResult {
    let mut machine = Machine::new(task, step_limit);
    run_blocks(&ast.blocks, &mut machine);
    machine.finish()
}

fn run_blocks(blocks: &[Block], m: &mut Machine<'_>) {
    for block in blocks {
        if m.halted() {
            return;
        }
        run_block(block, m);
    }
}

fn run_block(block: &Block, m: &mut Machine<'_>) {
    match block {
        Block::MoveForward | Block::TurnLeft | Block::TurnRight => {
            m.act(Action::from_block(block).expect("atomic"));
        }
        Block::Repeat { count, body } => {
            for _ in 0..*count {
                let before = m.steps();
                run_blocks(body, m);
                // A body that ran no action leaves the state unchanged, so the
                // remaining iterations would do nothing either.
                if m.halted() || m.steps() == before {
                    break;
                }
            }
        }
        Block::RepeatUntilGoal { body } => loop {
            if m.halted() || m.at_goal() {
                break;
            }
            let before = m.steps();
            run_blocks(body, m);
            if !m.halted() && m.steps() == before {
                m.stall();
            }
        },
        Block::IfElse { condition, then_branch, else_branch } => {
            if m.check(*condition) {
                run_blocks(then_branch, m);
            } else if let Some(else_branch) = else_branch {
                run_blocks(else_branch, m);
            }
        }
    }
}

/// True iff the program reaches the goal and fits the task's block budget.
pub fn is_solution(ast: &CodeAst, task: &Task) -> bool {
    if let Some(max) = task.max_blocks() {
        if ast.block_count() > max as usize {
            return false;
        }
    }
    execute(ast, task, DEFAULT_STEP_LIMIT).is_success()
}
