use super::syntax::{Expr, Program, Stmt};
use crate::flowgraphs::metamodels::ast_metamodel;
use crate::graph::{Graph, NodeId, Value};

/// Lower a parsed program into an AST graph.
///
/// Expressions stay opaque text except for the right-hand side of an assignment,
/// whose top-level operator becomes a `BinOp` over two operand `Expr` nodes.
/// Statement `index` counts statements in document order across the program.
pub fn build_ast(program: &Program) -> Graph {
    let mut b = Builder {
        g: Graph::new(ast_metamodel()),
        index: 0,
    };
    let root = b.node("Program", vec![]);
    for (i, m) in program.methods.iter().enumerate() {
        let method = b.node("Method", vec![("returnType", m.return_type.as_str().into())]);
        b.child(root, method, i);
        let name = b.node("Name", vec![("value", m.name.as_str().into())]);
        b.child(method, name, 0);
        b.block(method, 1, "body", &m.body);
    }
    b.g
}

struct Builder {
    g: Graph,
    index: i64,
}

impl Builder {
    fn node(&mut self, ty: &str, attrs: Vec<(&str, Value)>) -> NodeId {
        self.g.add_node(ty, attrs).expect("AST construction follows the metamodel")
    }

    fn child(&mut self, parent: NodeId, child: NodeId, pos: usize) {
        self.g
            .add_edge("child", parent, child, Some(pos as u32))
            .expect("AST construction follows the metamodel");
    }

    fn text(&mut self, parent: NodeId, pos: usize, ty: &str, text: String) {
        let n = self.node(ty, vec![("value", text.into())]);
        self.child(parent, n, pos);
    }

    fn block(&mut self, parent: NodeId, pos: usize, role: &str, stmts: &[Stmt]) {
        let block = self.node("Block", vec![("role", role.into())]);
        self.child(parent, block, pos);
        for (i, s) in stmts.iter().enumerate() {
            self.statement(block, i, s);
        }
    }

    fn statement(&mut self, block: NodeId, pos: usize, stmt: &Stmt) {
        let ty = match stmt {
            Stmt::Decl { .. } => "Decl",
            Stmt::Assign { .. } => "Assign",
            Stmt::If { .. } => "If",
            Stmt::While { .. } => "While",
            Stmt::Return(_) => "Return",
            Stmt::Break => "Break",
        };
        let index = self.index;
        self.index += 1;
        let s = self.node(ty, vec![("index", Value::Int(index))]);
        self.child(block, s, pos);
        match stmt {
            Stmt::Decl { name, init } => {
                self.text(s, 0, "Ident", name.clone());
                if let Some(e) = init {
                    self.text(s, 1, "Expr", e.to_text());
                }
            }
            Stmt::Assign { lhs, rhs } => {
                self.text(s, 0, "Ident", lhs.clone());
                self.expression_tree(s, 1, rhs);
            }
            Stmt::If { cond, then_block, else_block } => {
                self.text(s, 0, "Expr", cond.to_text());
                self.block(s, 1, "then", then_block);
                self.block(s, 2, "else", else_block);
            }
            Stmt::While { cond, body } => {
                self.text(s, 0, "Expr", cond.to_text());
                self.block(s, 1, "body", body);
            }
            Stmt::Return(value) => {
                if let Some(e) = value {
                    self.text(s, 0, "Expr", e.to_text());
                }
            }
            Stmt::Break => {}
        }
    }

    fn expression_tree(&mut self, parent: NodeId, pos: usize, e: &Expr) {
        match (e, e.operand_texts()) {
            (Expr::Binary(op, _, _), Some((l, r))) => {
                let bin = self.node("BinOp", vec![("value", op.as_str().into())]);
                self.child(parent, bin, pos);
                self.text(bin, 0, "Expr", l);
                self.text(bin, 1, "Expr", r);
            }
            _ => self.text(parent, pos, "Expr", e.to_text()),
        }
    }
}
