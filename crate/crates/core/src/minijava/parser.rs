use super::lexer::{tokenize, Token, TokenKind};
use super::syntax::{Expr, MethodDecl, Program, Stmt};
use super::{build_ast, ParseError};
use crate::graph::Graph;
use crate::ops;

pub fn parse_program(text: &str) -> Result<Graph, ParseError> {
    Ok(build_ast(&parse_syntax(text)?))
}

pub fn parse_syntax(text: &str) -> Result<Program, ParseError> {
    let tokens = tokenize(text)?;
    let end = match tokens.last() {
        Some(t) => (t.line, t.column + t.lexeme.chars().count()),
        None => (1, 1),
    };
    let mut p = Parser { tokens, pos: 0, end };
    let mut methods = vec![p.method()?];
    while p.peek().is_some() {
        methods.push(p.method()?);
    }
    Ok(Program { methods })
}

const EXPR_START: &[&str] = &["identifier", "integer literal", "`(`"];

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    end: (usize, usize),
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn error(&self, what: &str, expected: &[&str]) -> ParseError {
        let expected: Vec<String> = expected.iter().map(|s| s.to_string()).collect();
        match self.peek() {
            Some(t) => ParseError::new(t.line, t.column, &format!("{what}, found {t}"), expected),
            None => ParseError::new(self.end.0, self.end.1, &format!("{what}, found end of input"), expected),
        }
    }

    fn at(&self, kind: TokenKind, lexeme: &str) -> bool {
        self.peek().is_some_and(|t| t.is(kind, lexeme))
    }

    fn eat(&mut self, kind: TokenKind, lexeme: &str) -> bool {
        let hit = self.at(kind, lexeme);
        if hit {
            self.pos += 1;
        }
        hit
    }

    fn expect(&mut self, kind: TokenKind, lexeme: &str) -> Result<(), ParseError> {
        if self.eat(kind, lexeme) {
            Ok(())
        } else {
            let shown = format!("`{lexeme}`");
            Err(self.error(&format!("expected {shown}"), &[&shown]))
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek() {
            Some(t) if t.kind == TokenKind::Ident => {
                let name = t.lexeme.clone();
                self.pos += 1;
                Ok(name)
            }
            _ => Err(self.error("expected identifier", &["identifier"])),
        }
    }

    fn method(&mut self) -> Result<MethodDecl, ParseError> {
        let return_type = if self.eat(TokenKind::Keyword, "void") {
            "void"
        } else if self.eat(TokenKind::Keyword, "int") {
            "int"
        } else {
            return Err(self.error("expected method declaration", &["`void`", "`int`"]));
        };
        let name = self.ident()?;
        self.expect(TokenKind::Punct, "(")?;
        self.expect(TokenKind::Punct, ")")?;
        Ok(MethodDecl {
            return_type: return_type.to_string(),
            name,
            body: self.block()?,
        })
    }

    fn block(&mut self) -> Result<Vec<Stmt>, ParseError> {
        self.expect(TokenKind::Punct, "{")?;
        let mut stmts = Vec::new();
        while !self.eat(TokenKind::Punct, "}") {
            stmts.push(self.statement()?);
        }
        Ok(stmts)
    }

    fn statement(&mut self) -> Result<Stmt, ParseError> {
        let Some(tok) = self.peek().cloned() else {
            return Err(self.error("expected statement or `}`", &["statement", "`}`"]));
        };
        let kw = |k: &str| tok.is(TokenKind::Keyword, k);
        if kw("int") {
            self.pos += 1;
            let name = self.ident()?;
            let init = if self.eat(TokenKind::Punct, "=") {
                Some(self.expr()?)
            } else {
                None
            };
            self.expect(TokenKind::Punct, ";")?;
            Ok(Stmt::Decl { name, init })
        } else if kw("if") {
            self.pos += 1;
            let cond = self.condition()?;
            let then_block = self.block()?;
            let else_block = if self.eat(TokenKind::Keyword, "else") {
                self.block()?
            } else {
                Vec::new()
            };
            Ok(Stmt::If { cond, then_block, else_block })
        } else if kw("while") {
            self.pos += 1;
            let cond = self.condition()?;
            Ok(Stmt::While { cond, body: self.block()? })
        } else if kw("return") {
            self.pos += 1;
            let value = if self.at(TokenKind::Punct, ";") {
                None
            } else {
                Some(self.expr()?)
            };
            self.expect(TokenKind::Punct, ";")?;
            Ok(Stmt::Return(value))
        } else if kw("break") {
            self.pos += 1;
            self.expect(TokenKind::Punct, ";")?;
            Ok(Stmt::Break)
        } else if tok.kind == TokenKind::Ident {
            self.pos += 1;
            self.expect(TokenKind::Punct, "=")?;
            let rhs = self.expr()?;
            self.expect(TokenKind::Punct, ";")?;
            Ok(Stmt::Assign { lhs: tok.lexeme, rhs })
        } else {
            Err(self.error("expected statement or `}`", &["statement", "`}`"]))
        }
    }

    fn condition(&mut self) -> Result<Expr, ParseError> {
        self.expect(TokenKind::Punct, "(")?;
        let cond = self.expr()?;
        self.expect(TokenKind::Punct, ")")?;
        Ok(cond)
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        self.binary(1)
    }

    /// Precedence climbing; every operator is left-associative.
    fn binary(&mut self, min_prec: u8) -> Result<Expr, ParseError> {
        let mut lhs = self.atom()?;
        while let Some(tok) = self.peek() {
            if tok.kind != TokenKind::Operator {
                break;
            }
            let prec = ops::precedence(&tok.lexeme).expect("lexer emits table operators");
            if prec < min_prec {
                break;
            }
            let op = tok.lexeme.clone();
            self.pos += 1;
            let rhs = self.binary(prec + 1)?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            Some(t) if t.kind == TokenKind::Ident => {
                let e = Expr::Ident(t.lexeme.clone());
                self.pos += 1;
                Ok(e)
            }
            Some(t) if t.kind == TokenKind::IntLit => {
                let e = Expr::Int(t.lexeme.clone());
                self.pos += 1;
                Ok(e)
            }
            Some(t) if t.is(TokenKind::Punct, "(") => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(TokenKind::Punct, ")")?;
                Ok(e)
            }
            _ => Err(self.error("expected expression", EXPR_START)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn stmts(body: &str) -> Vec<Stmt> {
        let prog = parse_syntax(&format!("void m() {{ {body} }}")).unwrap();
        prog.methods[0].body.clone()
    }

    #[test]
    fn left_associative_with_precedence() {
        let Stmt::Assign { rhs, .. } = &stmts("a = b - c - d * e;")[0] else { panic!() };
        assert_eq!(rhs.to_text(), "b - c - d * e");
        let Expr::Binary(op, l, _) = rhs else { panic!() };
        assert_eq!(op, "-");
        assert_eq!(l.to_text(), "b - c");
    }

    #[test]
    fn parentheses_group() {
        let Stmt::Assign { rhs, .. } = &stmts("a = b - (c - d);")[0] else { panic!() };
        assert_eq!(rhs.to_text(), "b - (c - d)");
        let Stmt::Assign { rhs, .. } = &stmts("a = ((b));")[0] else { panic!() };
        assert_eq!(rhs, &Expr::Ident("b".into()));
    }

    #[test]
    fn missing_expression() {
        let err = parse_syntax("void m() { a = ; }").unwrap_err();
        assert_eq!(err.line, 1);
        assert_eq!(err.column, 16);
        assert!(err.message.contains("expected expression"));
        assert!(err.expected.contains(&"identifier".to_string()));
    }

    #[test]
    fn if_without_else_and_return_value() {
        let s = stmts("if (x) { return 1; } while (y < 2) { break; }");
        assert!(matches!(&s[0], Stmt::If { else_block, .. } if else_block.is_empty()));
        assert!(matches!(&s[1], Stmt::While { body, .. } if body == &vec![Stmt::Break]));
    }

    #[test]
    fn program_needs_a_method() {
        assert!(parse_syntax("").is_err());
        assert!(parse_syntax("void m() {").is_err());
    }
}
