use std::fmt::Write;

use thiserror::Error;

use crate::flowgraphs::metamodels::AST_METAMODEL;
use crate::graph::{Graph, NodeId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{location}: {message}")]
pub struct UnparseError {
    pub location: String,
    pub message: String,
}

impl UnparseError {
    fn at(node: NodeId, message: impl Into<String>) -> Self {
        Self {
            location: format!("node {node}"),
            message: message.into(),
        }
    }
}

const INDENT: &str = "    ";

/// Canonical source text of an AST graph.
pub fn unparse_program(ast: &Graph) -> Result<String, UnparseError> {
    if ast.metamodel().name() != AST_METAMODEL {
        return Err(UnparseError {
            location: "graph".into(),
            message: format!("metamodel `{}` is not `{AST_METAMODEL}`", ast.metamodel().name()),
        });
    }
    if let Some(d) = ast.conforms().into_iter().next() {
        return Err(UnparseError {
            location: d.location,
            message: d.message,
        });
    }
    let roots: Vec<NodeId> = ast
        .nodes()
        .filter(|n| ast.container(n.id).is_none())
        .map(|n| n.id)
        .collect();
    let [root] = roots[..] else {
        return Err(UnparseError {
            location: "graph".into(),
            message: format!("expected one root, found {}", roots.len()),
        });
    };
    let u = Unparser { g: ast };
    u.expect_type(root, "Program")?;
    let methods = ast.children(root, "child");
    if methods.is_empty() {
        return Err(UnparseError::at(root, "program without methods"));
    }
    let mut out = String::new();
    for (i, m) in methods.into_iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        u.method(m, &mut out)?;
    }
    Ok(out)
}

struct Unparser<'a> {
    g: &'a Graph,
}

impl Unparser<'_> {
    fn ty(&self, id: NodeId) -> &str {
        self.g.node_type(id).expect("child of a live node")
    }

    fn expect_type(&self, id: NodeId, ty: &str) -> Result<(), UnparseError> {
        if self.ty(id) == ty {
            Ok(())
        } else {
            Err(UnparseError::at(id, format!("expected `{ty}`, found `{}`", self.ty(id))))
        }
    }

    fn attr(&self, id: NodeId, attr: &str) -> Result<&str, UnparseError> {
        self.g
            .node(id)
            .and_then(|n| n.str_attr(attr))
            .ok_or_else(|| UnparseError::at(id, format!("missing `{attr}`")))
    }

    /// Children of `id`, checked against a type pattern; `None` entries are optional tails.
    fn shape(&self, id: NodeId, required: &[&str], optional: &[&str]) -> Result<Vec<NodeId>, UnparseError> {
        let kids = self.g.children(id, "child");
        if kids.len() < required.len() || kids.len() > required.len() + optional.len() {
            return Err(UnparseError::at(
                id,
                format!("`{}` has {} children", self.ty(id), kids.len()),
            ));
        }
        for (k, ty) in kids.iter().zip(required.iter().chain(optional)) {
            self.expect_type(*k, ty)?;
        }
        Ok(kids)
    }

    fn method(&self, m: NodeId, out: &mut String) -> Result<(), UnparseError> {
        self.expect_type(m, "Method")?;
        let kids = self.shape(m, &["Name", "Block"], &[])?;
        let rt = self.attr(m, "returnType")?;
        let name = self.attr(kids[0], "value")?;
        write!(out, "{rt} {name}() ").unwrap();
        self.block(kids[1], 0, out)?;
        out.push('\n');
        Ok(())
    }

    /// Writes `{ ... }` without a trailing newline; the opening brace continues the current line.
    fn block(&self, b: NodeId, depth: usize, out: &mut String) -> Result<(), UnparseError> {
        self.expect_type(b, "Block")?;
        out.push_str("{\n");
        for s in self.g.children(b, "child") {
            self.statement(s, depth + 1, out)?;
        }
        out.push_str(&INDENT.repeat(depth));
        out.push('}');
        Ok(())
    }

    fn expr(&self, id: NodeId) -> Result<&str, UnparseError> {
        self.expect_type(id, "Expr")?;
        self.attr(id, "value")
    }

    fn statement(&self, s: NodeId, depth: usize, out: &mut String) -> Result<(), UnparseError> {
        out.push_str(&INDENT.repeat(depth));
        match self.ty(s) {
            "Decl" => {
                let kids = self.shape(s, &["Ident"], &["Expr"])?;
                write!(out, "int {}", self.attr(kids[0], "value")?).unwrap();
                if let Some(&e) = kids.get(1) {
                    write!(out, " = {}", self.expr(e)?).unwrap();
                }
                out.push(';');
            }
            "Assign" => {
                let kids = self.g.children(s, "child");
                if kids.len() != 2 {
                    return Err(UnparseError::at(s, format!("`Assign` has {} children", kids.len())));
                }
                self.expect_type(kids[0], "Ident")?;
                let lhs = self.attr(kids[0], "value")?;
                let rhs = match self.ty(kids[1]) {
                    "BinOp" => {
                        let ops = self.shape(kids[1], &["Expr", "Expr"], &[])?;
                        let op = self.attr(kids[1], "value")?;
                        format!("{} {op} {}", self.expr(ops[0])?, self.expr(ops[1])?)
                    }
                    _ => self.expr(kids[1])?.to_string(),
                };
                write!(out, "{lhs} = {rhs};").unwrap();
            }
            "If" => {
                let kids = self.shape(s, &["Expr", "Block", "Block"], &[])?;
                write!(out, "if ({}) ", self.expr(kids[0])?).unwrap();
                self.block(kids[1], depth, out)?;
                if !self.g.children(kids[2], "child").is_empty() {
                    out.push_str(" else ");
                    self.block(kids[2], depth, out)?;
                }
            }
            "While" => {
                let kids = self.shape(s, &["Expr", "Block"], &[])?;
                write!(out, "while ({}) ", self.expr(kids[0])?).unwrap();
                self.block(kids[1], depth, out)?;
            }
            "Return" => {
                let kids = self.shape(s, &[], &["Expr"])?;
                match kids.first() {
                    Some(&e) => write!(out, "return {};", self.expr(e)?).unwrap(),
                    None => out.push_str("return;"),
                }
            }
            "Break" => {
                self.shape(s, &[], &[])?;
                out.push_str("break;");
            }
            other => return Err(UnparseError::at(s, format!("`{other}` is not a statement"))),
        }
        out.push('\n');
        Ok(())
    }
}
