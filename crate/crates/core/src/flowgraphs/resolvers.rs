//! AST searches behind the rules' binding expressions.

use crate::graph::{Graph, NodeId};

fn is_statement(ast: &Graph, n: NodeId) -> bool {
    ast.node_type(n).is_some_and(|t| ast.metamodel().is_subtype(t, "Stmt"))
}

fn owner_of_block(ast: &Graph, stmt: NodeId) -> Option<(NodeId, u32, NodeId)> {
    let edge = ast.container(stmt)?;
    let block = edge.source;
    (ast.node_type(block)? == "Block").then_some(())?;
    let owner = ast.container(block)?.source;
    Some((block, edge.position?, owner))
}

/// The AST node whose flow counterpart runs after `stmt` completes normally:
/// the next sibling, else the statement after an enclosing `If`, the enclosing
/// `While` itself, or the `Method` (which corresponds to the exit).
pub fn next_flow_node(ast: &Graph, stmt: NodeId) -> Option<NodeId> {
    if !is_statement(ast, stmt) {
        return None;
    }
    let (block, pos, owner) = owner_of_block(ast, stmt)?;
    if let Some(&next) = ast.children(block, "child").get(pos as usize + 1) {
        return Some(next);
    }
    match ast.node_type(owner)? {
        "If" => next_flow_node(ast, owner),
        "While" | "Method" => Some(owner),
        _ => None,
    }
}

/// The `Method` enclosing `stmt`.
pub fn enclosing_method(ast: &Graph, stmt: NodeId) -> Option<NodeId> {
    if !is_statement(ast, stmt) {
        return None;
    }
    let mut cur = stmt;
    loop {
        cur = ast.container(cur)?.source;
        if ast.node_type(cur)? == "Method" {
            return Some(cur);
        }
    }
}

/// Where a `break` continues: after its innermost enclosing `While`.
pub fn break_target(ast: &Graph, stmt: NodeId) -> Option<NodeId> {
    if !is_statement(ast, stmt) {
        return None;
    }
    let mut cur = stmt;
    loop {
        cur = ast.container(cur)?.source;
        match ast.node_type(cur)? {
            "While" => return next_flow_node(ast, cur),
            "Method" => return None,
            _ => {}
        }
    }
}
