use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use super::solve::synthesize_solution;
use crate::dsl::print_code;
use crate::prompting::build_expert_prompt;
use crate::world::Task;

/// One supervised fine-tuning pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FinetuneRecord {
    pub prompt: String,
    pub completion: String,
    pub task_id: String,
}

impl FinetuneRecord {
    pub fn for_task(task: &Task) -> Self {
        FinetuneRecord {
            prompt: build_expert_prompt(task),
            completion: print_code(&synthesize_solution(task)),
            task_id: task.id().to_string(),
        }
    }
}

/// Writes one record per task, in input order. Returns the record count.
pub fn emit_finetune_dataset<W: Write>(tasks: &[Task], out: W) -> io::Result<usize> {
    crate::jsonl::write_to(out, tasks.iter().map(FinetuneRecord::for_task))
}

/// Corpus sizes (train, validation) of the two reference-task families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FullScale {
    Hoc4,
    Hoc18,
}

impl FullScale {
    pub fn sizes(self) -> (usize, usize) {
        match self {
            FullScale::Hoc4 => (10_000, 500),
            FullScale::Hoc18 => (40_000, 500),
        }
    }
}
