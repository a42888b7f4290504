//! Synthesizing a student's attempt on a block-based maze task from one observed
//! attempt on a reference task, using a large language model.
//!
//! The crate is organized bottom-up:
//!
//! - [`dsl`]: the block language (parse, print, validate, tokenize)
//! - [`world`]: maze tasks, the interpreter and a BFS shortest-path oracle
//! - [`synthgen`]: task mutation, solution synthesis, simulated misconceptions
//!   and the fine-tuning corpus writer
//! - [`prompting`]: scenario records, prompt templates, response extraction and
//!   the re-query loop
//! - [`llm_client`]: chat-completion clients, the on-disk response cache and
//!   scripted stubs
//! - [`evalharness`]: BLEU, the Q-task proxy, rubric bookkeeping and reports
//! - [`pipeline`]: run-directory orchestration behind the `llmss` binary

pub mod dsl;
pub mod evalharness;
pub mod jsonl;
pub mod llm_client;
pub mod pipeline;
pub mod prompting;
pub mod reference;
pub mod synthgen;
pub mod world;

pub use dsl::{parse_code, print_code, Block, CodeAst, Condition};
pub use world::{execute, is_solution, print_grid, Task};
