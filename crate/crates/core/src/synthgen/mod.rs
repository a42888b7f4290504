//! Task corpus generation, ground-truth solution synthesis, simulated student
//! misconceptions and the fine-tuning corpus writer.

mod finetune;
mod mutate;
mod solve;
mod student;

use thiserror::Error;

pub use finetune::{emit_finetune_dataset, FinetuneRecord, FullScale};
pub use mutate::{derive_task, generate_tasks, mutate_task, CorpusSpec, MutationOp, MutationSpec, MAX_CANDIDATES};
pub use solve::{roll_repeats, synthesize_solution, MAX_LOOP_BODY};
pub use student::{apply_misconception, Misconception, MisconceptionError, StudentProfile};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SynthgenError {
    #[error("invalid mutation spec: {0}")]
    InvalidSpec(String),
    #[error("generation exhausted at index {index} after {tries} rejected candidates")]
    GenerationExhausted { index: u64, tries: usize },
}
