//! The block-code language: abstract syntax, the line-oriented text syntax,
//! validation against a block set, and the flat token scheme used by BLEU.
//!
//! ```text
//! program := stmt*
//! stmt    := "move_forward" | "turn_left" | "turn_right"
//!          | "repeat" "(" INT ")" "{" stmt* "}"
//!          | "repeat_until_goal" "{" stmt* "}"
//!          | "if" "(" cond ")" "{" stmt* "}" [ "else" "{" stmt* "}" ]
//! cond    := "path_ahead" | "path_left" | "path_right"
//! ```

mod ast;
pub mod gen;
mod lexer;
mod parser;

use serde::{Deserialize, Serialize};

pub use ast::{Block, BlockKind, BlockSet, CodeAst, Condition, MAX_BLOCKS, MAX_DEPTH};
pub use lexer::{tokenize, Position, Token, TokenKind};
pub use parser::{parse_code, ParseError};

const INDENT: &str = "  ";

/// Renders the canonical text form: one statement header per line, two spaces
/// of indentation per level, `{` on the header line and `}` on its own line.
pub fn print_code(ast: &CodeAst) -> String {
    let mut lines = Vec::new();
    print_blocks(&ast.blocks, 0, &mut lines);
    lines.join("\n")
}

fn print_blocks(blocks: &[Block], level: usize, out: &mut Vec<String>) {
    let pad = INDENT.repeat(level);
    for block in blocks {
        match block {
            Block::MoveForward | Block::TurnLeft | Block::TurnRight => {
                out.push(format!("{pad}{}", block.kind().keyword()));
            }
            Block::Repeat { count, body } => {
                out.push(format!("{pad}repeat({count}) {{"));
                print_blocks(body, level + 1, out);
                out.push(format!("{pad}}}"));
            }
            Block::RepeatUntilGoal { body } => {
                out.push(format!("{pad}repeat_until_goal {{"));
                print_blocks(body, level + 1, out);
                out.push(format!("{pad}}}"));
            }
            Block::IfElse { condition, then_branch, else_branch } => {
                out.push(format!("{pad}if ({}) {{", condition.keyword()));
                print_blocks(then_branch, level + 1, out);
                out.push(format!("{pad}}}"));
                if let Some(else_branch) = else_branch {
                    out.push(format!("{pad}else {{"));
                    print_blocks(else_branch, level + 1, out);
                    out.push(format!("{pad}}}"));
                }
            }
        }
    }
}

/// Flat token sequence of a program, one token per atomic block and one per
/// keyword, count, condition and brace of compound blocks.
pub fn code_tokens(ast: &CodeAst) -> Vec<String> {
    let mut out = Vec::new();
    push_tokens(&ast.blocks, &mut out);
    out
}

fn push_tokens(blocks: &[Block], out: &mut Vec<String>) {
    let body = |out: &mut Vec<String>, inner: &[Block]| {
        out.push("{".into());
        push_tokens(inner, out);
        out.push("}".into());
    };
    for block in blocks {
        match block {
            Block::MoveForward | Block::TurnLeft | Block::TurnRight => out.push(block.kind().keyword().into()),
            Block::Repeat { count, body: inner } => {
                out.push("repeat".into());
                out.push(count.to_string());
                body(out, inner);
            }
            Block::RepeatUntilGoal { body: inner } => {
                out.push("repeat_until_goal".into());
                body(out, inner);
            }
            Block::IfElse { condition, then_branch, else_branch } => {
                out.push("if".into());
                out.push(condition.keyword().into());
                body(out, then_branch);
                if let Some(else_branch) = else_branch {
                    out.push("else".into());
                    body(out, else_branch);
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub valid: bool,
    pub unknown_tokens: Vec<String>,
    pub violations: Vec<String>,
}

impl ValidationReport {
    fn new(unknown_tokens: Vec<String>, violations: Vec<String>) -> Self {
        ValidationReport { valid: unknown_tokens.is_empty() && violations.is_empty(), unknown_tokens, violations }
    }
}

/// Input to [`validate_blocks`]: an already-parsed program or raw text.
#[derive(Debug, Clone, Copy)]
pub enum CodeInput<'a> {
    Ast(&'a CodeAst),
    Text(&'a str),
}

impl<'a> From<&'a CodeAst> for CodeInput<'a> {
    fn from(ast: &'a CodeAst) -> Self {
        CodeInput::Ast(ast)
    }
}

impl<'a> From<&'a str> for CodeInput<'a> {
    fn from(text: &'a str) -> Self {
        CodeInput::Text(text)
    }
}

pub(crate) fn is_keyword(word: &str) -> bool {
    BlockKind::ALL.iter().any(|k| k.keyword() == word) || word == "else" || Condition::from_keyword(word).is_some()
}

/// Word tokens in `text` that are not part of the language, in first-seen order.
pub fn unknown_tokens(text: &str) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for tok in tokenize(text) {
        if let TokenKind::Word(w) = tok.kind {
            if !is_keyword(&w) && !out.contains(&w) {
                out.push(w);
            }
        }
    }
    out
}

/// Checks a program against a block set and the structural limits. Text input
/// is scanned for every unknown token before any parse is attempted.
pub fn validate_blocks<'a>(input: impl Into<CodeInput<'a>>, allowed: &BlockSet) -> ValidationReport {
    match input.into() {
        CodeInput::Ast(ast) => ValidationReport::new(Vec::new(), ast_violations(ast, allowed)),
        CodeInput::Text(text) => {
            let unknown = unknown_tokens(text);
            if !unknown.is_empty() {
                return ValidationReport::new(unknown, Vec::new());
            }
            match parse_code(text) {
                Ok(ast) => ValidationReport::new(Vec::new(), ast_violations(&ast, allowed)),
                Err(e) => ValidationReport::new(Vec::new(), vec![e.to_string()]),
            }
        }
    }
}

fn ast_violations(ast: &CodeAst, allowed: &BlockSet) -> Vec<String> {
    let mut violations = Vec::new();
    let mut disallowed: Vec<BlockKind> = Vec::new();
    ast.walk(|b| {
        let kind = b.kind();
        if !allowed.contains(kind) && !disallowed.contains(&kind) {
            disallowed.push(kind);
        }
        match b {
            Block::Repeat { count: 0, .. } => violations.push("repeat has non-positive count 0".to_string()),
            Block::IfElse { else_branch: Some(e), .. } if e.is_empty() => {
                violations.push("if has a present but empty else branch".to_string())
            }
            _ => {}
        }
    });
    for kind in disallowed {
        violations.push(format!("block `{}` is not in the allowed set", kind.keyword()));
    }
    let depth = ast.depth();
    if depth > MAX_DEPTH {
        violations.push(format!("nesting depth {depth} exceeds {MAX_DEPTH}"));
    }
    let count = ast.block_count();
    if count > MAX_BLOCKS {
        violations.push(format!("{count} blocks exceeds the limit of {MAX_BLOCKS}"));
    }
    violations
}


// Programs travel through record files as canonical text.
impl Serialize for CodeAst {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&print_code(self))
    }
}

impl<'de> Deserialize<'de> for CodeAst {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        parse_code(&text).map_err(serde::de::Error::custom)
    }
}
