use thiserror::Error;

use crate::dsl::{code_tokens, is_keyword, parse_code, unknown_tokens, validate_blocks, BlockSet, CodeAst};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExtractionError {
    #[error("no code found in the response")]
    NoCodeFound,
    #[error("response uses blocks outside the language: {}", .0.join(", "))]
    InvalidBlocks(Vec<String>),
    #[error("response code breaks block constraints: {}", .0.join("; "))]
    Violations(Vec<String>),
}

fn is_fence(line: &str) -> bool {
    line.trim_start().starts_with("```")
}

/// Contents of every closed ``` fenced region, in order.
fn fenced_regions(response: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut current: Option<Vec<&str>> = None;
    for line in response.lines() {
        if is_fence(line) {
            match current.take() {
                Some(lines) => out.push(lines.join("\n")),
                None => current = Some(Vec::new()),
            }
        } else if let Some(lines) = current.as_mut() {
            lines.push(line);
        }
    }
    out
}

fn looks_like_block_name(word: &str) -> bool {
    let bytes = word.as_bytes();
    word.contains('_') || bytes.windows(2).any(|w| w[0].is_ascii_lowercase() && w[1].is_ascii_uppercase())
}

/// A line that reads as code rather than prose: only identifier characters,
/// digits, braces and parentheses, with at least one keyword, brace, or
/// block-like identifier (`snake_case` or `camelCase`).
fn is_code_line(line: &str) -> bool {
    let line = line.trim();
    if line.is_empty() || is_fence(line) {
        return false;
    }
    if !line.chars().all(|c| c.is_ascii_alphanumeric() || c.is_whitespace() || "_{}()-+".contains(c)) {
        return false;
    }
    line.split(|c: char| c.is_whitespace() || "{}()".contains(c))
        .any(|w| is_keyword(w) || looks_like_block_name(w))
        || line.contains(['{', '}'])
}

/// Maximal runs of code lines outside fences. Blank lines do not break a run.
fn raw_regions(response: &str) -> Vec<Vec<String>> {
    let mut out = Vec::new();
    let mut current: Vec<String> = Vec::new();
    let mut in_fence = false;
    for line in response.lines() {
        if is_fence(line) {
            in_fence = !in_fence;
            if !current.is_empty() {
                out.push(std::mem::take(&mut current));
            }
            continue;
        }
        if in_fence {
            continue;
        }
        if is_code_line(line) {
            current.push(line.to_string());
        } else if !line.trim().is_empty() && !current.is_empty() {
            out.push(std::mem::take(&mut current));
        }
    }
    if !current.is_empty() {
        out.push(current);
    }
    out
}

enum Verdict {
    Code(CodeAst),
    Unknown(Vec<String>),
    Violations(Vec<String>),
    Unparsable,
}

fn judge(text: &str) -> Verdict {
    let unknown = unknown_tokens(text);
    if !unknown.is_empty() {
        return Verdict::Unknown(unknown);
    }
    match parse_code(text) {
        Ok(ast) if ast.is_empty() => Verdict::Unparsable,
        Ok(ast) => {
            let report = validate_blocks(&ast, &BlockSet::full());
            if report.valid {
                Verdict::Code(ast)
            } else {
                Verdict::Violations(report.violations)
            }
        }
        Err(_) => Verdict::Unparsable,
    }
}

/// Longest contiguous run of lines in a region that parses to valid code.
fn best_subrun(lines: &[String]) -> Option<CodeAst> {
    let mut best: Option<CodeAst> = None;
    for start in 0..lines.len() {
        for end in (start + 1..=lines.len()).rev() {
            if let Verdict::Code(ast) = judge(&lines[start..end].join("\n")) {
                if best.as_ref().is_none_or(|b| code_tokens(&ast).len() > code_tokens(b).len()) {
                    best = Some(ast);
                }
                break;
            }
        }
    }
    best
}

fn longest(candidates: Vec<CodeAst>) -> Option<CodeAst> {
    candidates.into_iter().fold(None, |best, ast| match best {
        Some(b) if code_tokens(&b).len() >= code_tokens(&ast).len() => Some(b),
        _ => Some(ast),
    })
}

/// Keeps the first problem seen, letting unknown blocks outrank constraint violations.
fn note(slot: &mut Option<ExtractionError>, err: ExtractionError) {
    let replace = match (&slot, &err) {
        (None, _) => true,
        (Some(ExtractionError::Violations(_)), ExtractionError::InvalidBlocks(_)) => true,
        _ => false,
    };
    if replace {
        *slot = Some(err);
    }
}

/// Pulls the synthesized attempt out of a model response. Fenced regions are
/// tried first, then unfenced runs of code-looking lines; the longest region
/// that parses and validates wins. When nothing valid is found, the first
/// region that mentions unknown blocks is reported.
pub fn extract_attempt(response: &str) -> Result<CodeAst, ExtractionError> {
    let mut first_problem: Option<ExtractionError> = None;
    let mut fenced = Vec::new();
    for region in fenced_regions(response) {
        match judge(&region) {
            Verdict::Code(ast) => fenced.push(ast),
            Verdict::Unknown(u) => note(&mut first_problem, ExtractionError::InvalidBlocks(u)),
            Verdict::Violations(v) => note(&mut first_problem, ExtractionError::Violations(v)),
            Verdict::Unparsable => {}
        }
    }
    if let Some(ast) = longest(fenced) {
        return Ok(ast);
    }

    let mut raw = Vec::new();
    for lines in raw_regions(response) {
        match judge(&lines.join("\n")) {
            Verdict::Code(ast) => raw.push(ast),
            Verdict::Unknown(u) => note(&mut first_problem, ExtractionError::InvalidBlocks(u)),
            Verdict::Violations(v) => note(&mut first_problem, ExtractionError::Violations(v)),
            Verdict::Unparsable => raw.extend(best_subrun(&lines)),
        }
    }
    if let Some(ast) = longest(raw) {
        return Ok(ast);
    }
    Err(first_problem.unwrap_or(ExtractionError::NoCodeFound))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::Block;

    #[test]
    fn fenced_code() {
        let ast = extract_attempt("Here is the attempt:\n```\nmove_forward\nmove_forward\n```").unwrap();
        assert_eq!(ast.blocks, vec![Block::MoveForward, Block::MoveForward]);
    }

    #[test]
    fn prose_only() {
        assert_eq!(extract_attempt("the student would jump over the wall"), Err(ExtractionError::NoCodeFound));
    }

    #[test]
    fn unknown_block() {
        assert_eq!(extract_attempt("move_forward\nfly_up"), Err(ExtractionError::InvalidBlocks(vec!["fly_up".into()])));
    }

    #[test]
    fn camel_case_blocks_are_invalid() {
        let err = extract_attempt("```\nmoveForward\nturnLeft\n```").unwrap_err();
        assert_eq!(err, ExtractionError::InvalidBlocks(vec!["moveForward".into(), "turnLeft".into()]));
    }

    #[test]
    fn explanation_then_raw_code() {
        let response = "The student forgets loops.\nSo on the target task they would write:\n\nturn_right\nmove_forward\n\nmove_forward\nThat is all.";
        let ast = extract_attempt(response).unwrap();
        assert_eq!(ast.blocks, vec![Block::TurnRight, Block::MoveForward, Block::MoveForward]);
    }

    #[test]
    fn longest_fence_wins_and_language_tags_are_ignored() {
        let response = "Reference:\n```text\nmove_forward\n```\nTarget:\n```code\nrepeat_until_goal {\n  move_forward\n  turn_left\n}\n```";
        let ast = extract_attempt(response).unwrap();
        assert_eq!(ast.block_count(), 3);
    }

    #[test]
    fn stray_brace_falls_back_to_parsable_lines() {
        let ast = extract_attempt("move_forward\nturn_left\n}").unwrap();
        assert_eq!(ast.blocks, vec![Block::MoveForward, Block::TurnLeft]);
    }

    #[test]
    fn valid_fence_beats_invalid_raw_text() {
        let response = "I'd use fly_up first\n```\nturn_left\n```";
        assert_eq!(extract_attempt(response).unwrap().blocks, vec![Block::TurnLeft]);
    }

    #[test]
    fn empty_fence_is_not_code() {
        assert_eq!(extract_attempt("```\n```"), Err(ExtractionError::NoCodeFound));
    }
}
