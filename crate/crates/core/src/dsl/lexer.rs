use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TokenKind {
    Word(String),
    /// Integer literal; the sign is kept so non-positive counts can be reported.
    Int(String),
    LBrace,
    RBrace,
    LParen,
    RParen,
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TokenKind::Word(w) | TokenKind::Int(w) => f.write_str(w),
            TokenKind::LBrace => f.write_str("{"),
            TokenKind::RBrace => f.write_str("}"),
            TokenKind::LParen => f.write_str("("),
            TokenKind::RParen => f.write_str(")"),
        }
    }
}

/// Where a token starts. `index` is 1-based over the token stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Position {
    pub index: usize,
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "token {} (line {}, column {})", self.index, self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub pos: Position,
}

fn is_punct(c: char) -> bool {
    matches!(c, '{' | '}' | '(' | ')')
}

fn classify(word: &str) -> TokenKind {
    let digits = word.strip_prefix(['-', '+']).unwrap_or(word);
    if !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit()) {
        TokenKind::Int(word.to_string())
    } else {
        TokenKind::Word(word.to_string())
    }
}

/// Splits source text into tokens. Braces and parentheses are always their own
/// tokens; any other run of non-whitespace characters is one word or integer.
pub fn tokenize(source: &str) -> Vec<Token> {
    let mut out = Vec::new();
    let mut line = 1;
    let mut column = 0;
    let mut current: Option<(String, usize, usize)> = None;

    let flush = |cur: &mut Option<(String, usize, usize)>, out: &mut Vec<Token>| {
        if let Some((word, l, c)) = cur.take() {
            let index = out.len() + 1;
            out.push(Token { kind: classify(&word), pos: Position { index, line: l, column: c } });
        }
    };

    for ch in source.chars() {
        column += 1;
        if ch.is_whitespace() {
            flush(&mut current, &mut out);
            if ch == '\n' {
                line += 1;
                column = 0;
            }
        } else if is_punct(ch) {
            flush(&mut current, &mut out);
            let kind = match ch {
                '{' => TokenKind::LBrace,
                '}' => TokenKind::RBrace,
                '(' => TokenKind::LParen,
                _ => TokenKind::RParen,
            };
            let index = out.len() + 1;
            out.push(Token { kind, pos: Position { index, line, column } });
        } else {
            match current.as_mut() {
                Some((word, _, _)) => word.push(ch),
                None => current = Some((ch.to_string(), line, column)),
            }
        }
    }
    flush(&mut current, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splits_punctuation_and_words() {
        let toks: Vec<String> = tokenize("repeat(3){move_forward}").iter().map(|t| t.kind.to_string()).collect();
        assert_eq!(toks, ["repeat", "(", "3", ")", "{", "move_forward", "}"]);
    }

    #[test]
    fn tracks_lines_and_columns() {
        let toks = tokenize("move_forward\n  turn_left");
        assert_eq!(toks[1].pos, Position { index: 2, line: 2, column: 3 });
    }

    #[test]
    fn signed_integers_are_ints() {
        assert_eq!(tokenize("-1")[0].kind, TokenKind::Int("-1".into()));
        assert_eq!(tokenize("x1")[0].kind, TokenKind::Word("x1".into()));
    }
}
