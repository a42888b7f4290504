use thiserror::Error;

use super::ast::{Block, CodeAst, Condition};
use super::lexer::{tokenize, Position, Token, TokenKind};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at {position}: expected {expected}, found {found}")]
pub struct ParseError {
    pub position: Position,
    pub expected: String,
    pub found: String,
}

const STATEMENT: &str = "a statement (move_forward, turn_left, turn_right, repeat, repeat_until_goal, if)";

struct Parser {
    tokens: Vec<Token>,
    cursor: usize,
    end: Position,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.cursor)
    }

    fn error(&self, expected: impl Into<String>) -> ParseError {
        match self.peek() {
            Some(tok) => ParseError { position: tok.pos, expected: expected.into(), found: format!("\"{}\"", tok.kind) },
            None => ParseError { position: self.end, expected: expected.into(), found: "end of input".into() },
        }
    }

    fn expect(&mut self, kind: TokenKind) -> Result<(), ParseError> {
        match self.peek() {
            Some(tok) if tok.kind == kind => {
                self.cursor += 1;
                Ok(())
            }
            _ => Err(self.error(format!("\"{kind}\""))),
        }
    }

    fn program(&mut self) -> Result<Vec<Block>, ParseError> {
        let mut blocks = Vec::new();
        while self.peek().is_some() {
            blocks.push(self.statement()?);
        }
        Ok(blocks)
    }

    fn body(&mut self) -> Result<Vec<Block>, ParseError> {
        self.expect(TokenKind::LBrace)?;
        let mut blocks = Vec::new();
        loop {
            match self.peek() {
                Some(Token { kind: TokenKind::RBrace, .. }) => {
                    self.cursor += 1;
                    return Ok(blocks);
                }
                Some(_) => blocks.push(self.statement()?),
                None => return Err(self.error("\"}\"")),
            }
        }
    }

    fn statement(&mut self) -> Result<Block, ParseError> {
        let word = match self.peek() {
            Some(Token { kind: TokenKind::Word(w), .. }) => w.clone(),
            _ => return Err(self.error(STATEMENT)),
        };
        let block = match word.as_str() {
            "move_forward" => {
                self.cursor += 1;
                Block::MoveForward
            }
            "turn_left" => {
                self.cursor += 1;
                Block::TurnLeft
            }
            "turn_right" => {
                self.cursor += 1;
                Block::TurnRight
            }
            "repeat" => {
                self.cursor += 1;
                self.expect(TokenKind::LParen)?;
                let count = self.repeat_count()?;
                self.expect(TokenKind::RParen)?;
                Block::Repeat { count, body: self.body()? }
            }
            "repeat_until_goal" => {
                self.cursor += 1;
                Block::RepeatUntilGoal { body: self.body()? }
            }
            "if" => {
                self.cursor += 1;
                self.expect(TokenKind::LParen)?;
                let condition = self.condition()?;
                self.expect(TokenKind::RParen)?;
                let then_branch = self.body()?;
                let else_branch = match self.peek() {
                    Some(Token { kind: TokenKind::Word(w), .. }) if w == "else" => {
                        self.cursor += 1;
                        Some(self.body()?)
                    }
                    _ => None,
                };
                Block::IfElse { condition, then_branch, else_branch }
            }
            _ => return Err(self.error(STATEMENT)),
        };
        Ok(block)
    }

    fn repeat_count(&mut self) -> Result<u32, ParseError> {
        let expected = "a positive repeat count";
        let text = match self.peek() {
            Some(Token { kind: TokenKind::Int(text), .. }) => text.clone(),
            _ => return Err(self.error(expected)),
        };
        match text.parse::<i64>() {
            Ok(n) if n >= 1 && n <= u32::MAX as i64 => {
                self.cursor += 1;
                Ok(n as u32)
            }
            Ok(_) => Err(ParseError {
                expected: expected.into(),
                found: format!("non-positive repeat count {text}"),
                ..self.error(expected)
            }),
            Err(_) => Err(self.error(expected)),
        }
    }

    fn condition(&mut self) -> Result<Condition, ParseError> {
        let expected = "a condition (path_ahead, path_left, path_right)";
        match self.peek() {
            Some(Token { kind: TokenKind::Word(w), .. }) => match Condition::from_keyword(w) {
                Some(c) => {
                    self.cursor += 1;
                    Ok(c)
                }
                None => Err(self.error(expected)),
            },
            _ => Err(self.error(expected)),
        }
    }
}

/// Parses program text. Whitespace (including newlines) only separates tokens.
pub fn parse_code(source: &str) -> Result<CodeAst, ParseError> {
    let tokens = tokenize(source);
    let lines = source.split('\n').count();
    let last_len = source.rsplit('\n').next().map(|l| l.chars().count()).unwrap_or(0);
    let end = Position { index: tokens.len() + 1, line: lines, column: last_len + 1 };
    let mut parser = Parser { tokens, cursor: 0, end };
    Ok(CodeAst::new(parser.program()?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_atomic_statements() {
        let ast = parse_code("move_forward\nturn_left").unwrap();
        assert_eq!(ast.blocks, vec![Block::MoveForward, Block::TurnLeft]);
    }

    #[test]
    fn canonical_nested_form() {
        let ast = parse_code("repeat_until_goal { if (path_ahead) { move_forward } else { turn_left } }").unwrap();
        assert_eq!(
            ast.blocks,
            vec![Block::repeat_until_goal(vec![Block::if_else(
                Condition::PathAhead,
                vec![Block::MoveForward],
                Some(vec![Block::TurnLeft]),
            )])]
        );
    }

    #[test]
    fn unknown_token_reports_position() {
        let err = parse_code("jump").unwrap_err();
        assert_eq!(err.position.index, 1);
        assert_eq!(err.found, "\"jump\"");
    }

    #[test]
    fn unbalanced_braces() {
        let err = parse_code("repeat_until_goal { move_forward").unwrap_err();
        assert_eq!(err.found, "end of input");
        assert!(parse_code("move_forward }").is_err());
    }

    #[test]
    fn non_positive_repeat_counts() {
        for src in ["repeat(0) { move_forward }", "repeat(-2) { move_forward }"] {
            let err = parse_code(src).unwrap_err();
            assert!(err.found.contains("non-positive"), "{err}");
            assert_eq!(err.position.index, 3);
        }
    }

    #[test]
    fn if_without_else() {
        let ast = parse_code("if (path_left) { turn_left }").unwrap();
        assert_eq!(ast.blocks, vec![Block::if_else(Condition::PathLeft, vec![Block::TurnLeft], None)]);
    }

    #[test]
    fn empty_program_is_legal() {
        assert!(parse_code("  \n ").unwrap().is_empty());
    }

    #[test]
    fn else_without_if_is_rejected() {
        assert!(parse_code("else { move_forward }").is_err());
    }
}
