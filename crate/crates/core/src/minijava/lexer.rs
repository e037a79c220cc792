use std::fmt;

use super::ParseError;
use crate::ops;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenKind {
    Ident,
    IntLit,
    Keyword,
    Operator,
    Punct,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub lexeme: String,
    /// 1-based.
    pub line: usize,
    /// 1-based, in characters.
    pub column: usize,
}

impl Token {
    pub fn is(&self, kind: TokenKind, lexeme: &str) -> bool {
        self.kind == kind && self.lexeme == lexeme
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "`{}`", self.lexeme)
    }
}

pub const KEYWORDS: &[&str] = &["void", "int", "if", "else", "while", "return", "break"];

pub fn tokenize(text: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let start_col = col;
        let take = |pred: fn(char) -> bool, i: &mut usize| {
            let start = *i;
            while *i < chars.len() && pred(chars[*i]) {
                *i += 1;
            }
            chars[start..*i].iter().collect::<String>()
        };
        let (kind, lexeme) = if c.is_ascii_alphabetic() || c == '_' {
            let word = take(|c| c.is_ascii_alphanumeric() || c == '_', &mut i);
            let kind = if KEYWORDS.contains(&word.as_str()) {
                TokenKind::Keyword
            } else {
                TokenKind::Ident
            };
            (kind, word)
        } else if c.is_ascii_digit() {
            let digits = take(|c| c.is_ascii_digit(), &mut i);
            if i < chars.len() && (chars[i].is_ascii_alphabetic() || chars[i] == '_') {
                return Err(ParseError::new(line, col + digits.len(), "malformed number", vec![]));
            }
            (TokenKind::IntLit, digits)
        } else if "(){};".contains(c) {
            i += 1;
            (TokenKind::Punct, c.to_string())
        } else {
            let rest: String = chars[i..chars.len().min(i + 2)].iter().collect();
            match ops::operator_prefix(&rest) {
                Some(op) => {
                    i += op.chars().count();
                    (TokenKind::Operator, op.to_string())
                }
                None if c == '=' => {
                    i += 1;
                    (TokenKind::Punct, "=".to_string())
                }
                None => {
                    return Err(ParseError::new(line, col, &format!("unexpected character `{c}`"), vec![]));
                }
            }
        };
        col = start_col + lexeme.chars().count();
        tokens.push(Token {
            kind,
            lexeme,
            line,
            column: start_col,
        });
    }
    Ok(tokens)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn positions_and_kinds() {
        let toks = tokenize("while(x<=3){\n  a = b==c; // note\n}").unwrap();
        let lex: Vec<&str> = toks.iter().map(|t| t.lexeme.as_str()).collect();
        assert_eq!(lex, ["while", "(", "x", "<=", "3", ")", "{", "a", "=", "b", "==", "c", ";", "}"]);
        assert_eq!(toks[0].kind, TokenKind::Keyword);
        assert_eq!(toks[3].kind, TokenKind::Operator);
        assert_eq!(toks[8].kind, TokenKind::Punct);
        assert_eq!((toks[7].line, toks[7].column), (2, 3));
        assert_eq!((toks[13].line, toks[13].column), (3, 1));
    }

    #[test]
    fn rejects_stray_characters() {
        let err = tokenize("a = b ! c;").unwrap_err();
        assert_eq!((err.line, err.column), (1, 7));
        assert!(tokenize("a = 3x;").is_err());
    }
}
