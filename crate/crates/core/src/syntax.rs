//! Tokenizer shared by the lattice-term and L⁺ parsers.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at column {column}: {message}")]
pub struct SyntaxError {
    pub column: usize,
    pub message: String,
}

impl SyntaxError {
    pub fn new(column: usize, message: impl Into<String>) -> Self {
        SyntaxError { column, message: message.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    And,
    Or,
    Minus,
    Implies,
    Not,
    LParen,
    RParen,
    Comma,
    Semi,
    Colon,
    Dot,
    Leq,
    Arrow,
    /// `<XY>`, `[YX-1]` and friends: (relation text, is_box, inverse).
    Modal(String, bool, bool),
}

/// A token with its 1-based column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Spanned {
    pub tok: Tok,
    pub column: usize,
}

pub fn tokenize(src: &str) -> Result<Vec<Spanned>, SyntaxError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let column = i + 1;
        let rest: String = chars[i..chars.len().min(i + 8)].iter().collect();
        let push = |out: &mut Vec<Spanned>, tok| out.push(Spanned { tok, column });
        if c.is_whitespace() {
            i += 1;
        } else if rest.starts_with("/\\") {
            push(&mut out, Tok::And);
            i += 2;
        } else if rest.starts_with("\\/") {
            push(&mut out, Tok::Or);
            i += 2;
        } else if rest.starts_with("->") {
            push(&mut out, Tok::Implies);
            i += 2;
        } else if rest.starts_with("<=") {
            push(&mut out, Tok::Leq);
            i += 2;
        } else if rest.starts_with("=>") {
            push(&mut out, Tok::Arrow);
            i += 2;
        } else if c == '<' || c == '[' {
            let close = if c == '<' { '>' } else { ']' };
            let end = chars[i + 1..]
                .iter()
                .position(|&d| d == close)
                .map(|p| i + 1 + p)
                .ok_or_else(|| SyntaxError::new(column, format!("unclosed modality, expected {close:?}")))?;
            let inner: String = chars[i + 1..end].iter().collect();
            let (rel, inv) = match inner.strip_suffix("-1") {
                Some(r) => (r.to_string(), true),
                None => (inner.clone(), false),
            };
            if !matches!(rel.as_str(), "XY" | "YX" | "XX") {
                return Err(SyntaxError::new(column, format!("unknown relation {inner:?}")));
            }
            push(&mut out, Tok::Modal(rel, c == '[', inv));
            i = end + 1;
        } else if c == '\\' {
            push(&mut out, Tok::Minus);
            i += 1;
        } else if c == '~' || c == '¬' {
            push(&mut out, Tok::Not);
            i += 1;
        } else if c == '(' {
            push(&mut out, Tok::LParen);
            i += 1;
        } else if c == ')' {
            push(&mut out, Tok::RParen);
            i += 1;
        } else if c == ',' {
            push(&mut out, Tok::Comma);
            i += 1;
        } else if c == ';' {
            push(&mut out, Tok::Semi);
            i += 1;
        } else if c == ':' {
            push(&mut out, Tok::Colon);
            i += 1;
        } else if c == '.' {
            push(&mut out, Tok::Dot);
            i += 1;
        } else if c.is_alphanumeric() || c == '_' || c == '?' {
            let start = i;
            i += 1;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '\'') {
                i += 1;
            }
            push(&mut out, Tok::Ident(chars[start..i].iter().collect()));
        } else {
            return Err(SyntaxError::new(column, format!("unexpected character {c:?}")));
        }
    }
    Ok(out)
}

/// Cursor over a token list.
pub struct Cursor {
    toks: Vec<Spanned>,
    pos: usize,
    end_column: usize,
}

impl Cursor {
    pub fn new(src: &str) -> Result<Cursor, SyntaxError> {
        Ok(Cursor { toks: tokenize(src)?, pos: 0, end_column: src.chars().count() + 1 })
    }

    pub fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    pub fn column(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end_column, |s| s.column)
    }

    pub fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|s| s.tok.clone());
        self.pos += 1;
        t
    }

    pub fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    pub fn expect(&mut self, t: &Tok, what: &str) -> Result<(), SyntaxError> {
        if self.eat(t) {
            Ok(())
        } else {
            Err(self.error(format!("expected {what}")))
        }
    }

    pub fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    pub fn error(&self, message: impl Into<String>) -> SyntaxError {
        let found = match self.peek() {
            Some(t) => format!(", found {t:?}"),
            None => ", found end of input".to_string(),
        };
        SyntaxError::new(self.column(), format!("{}{}", message.into(), found))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tokens_and_columns() {
        let t = tokenize("x /\\ <XY-1>y").unwrap();
        assert_eq!(t[0], Spanned { tok: Tok::Ident("x".into()), column: 1 });
        assert_eq!(t[1].tok, Tok::And);
        assert_eq!(t[2], Spanned { tok: Tok::Modal("XY".into(), false, true), column: 6 });
        assert!(tokenize("x # y").is_err());
        assert_eq!(tokenize("<ZZ>x").unwrap_err().column, 1);
    }
}
