//! Text ↔ AST for the mini-Java subset.

use thiserror::Error;

mod ast;
pub mod lexer;
mod parser;
pub mod syntax;
mod unparse;

pub use ast::build_ast;
pub use parser::{parse_program, parse_syntax};
pub use unparse::{unparse_program, UnparseError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {message}{}", expected_suffix(.expected))]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
    pub expected: Vec<String>,
}

impl ParseError {
    pub fn new(line: usize, column: usize, message: &str, expected: Vec<String>) -> Self {
        Self {
            line,
            column,
            message: message.to_string(),
            expected,
        }
    }
}

fn expected_suffix(expected: &[String]) -> String {
    if expected.is_empty() {
        String::new()
    } else {
        format!(" (expected {})", expected.join(", "))
    }
}

/// Canonical form of a program text.
pub fn normalize(text: &str) -> Result<String, ParseError> {
    let ast = parse_program(text)?;
    Ok(unparse_program(&ast).expect("parser output is a conformant AST"))
}
