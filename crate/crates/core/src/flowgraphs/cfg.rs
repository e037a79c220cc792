//! Reading control flow off a flow graph.

use std::collections::BTreeSet;

use crate::graph::{Graph, NodeId};

fn role_rank(flow: &Graph, seq: NodeId) -> u8 {
    match flow.node(seq).and_then(|n| n.str_attr("role")) {
        Some("else") => 1,
        _ => 0,
    }
}

/// `Seq` children of a flow node, then-branch before else-branch.
pub fn sequences(flow: &Graph, node: NodeId) -> Vec<NodeId> {
    let mut seqs = flow.children(node, "seq");
    seqs.sort_by_key(|&s| role_rank(flow, s));
    seqs
}

fn sequence_with_role(flow: &Graph, node: NodeId, role: &str) -> Option<NodeId> {
    flow.children(node, "seq")
        .into_iter()
        .find(|&s| flow.node(s).and_then(|n| n.str_attr("role")) == Some(role))
}

fn first_statement(flow: &Graph, node: NodeId, role: &str) -> Option<NodeId> {
    let seq = sequence_with_role(flow, node, role)?;
    flow.children(seq, "stmts").first().copied()
}

fn methods(flow: &Graph) -> Vec<NodeId> {
    flow.nodes().filter(|n| n.ty == "Method").map(|n| n.id).collect()
}

/// Statement nodes in program order: each method's body, depth first, then
/// branches before else branches. Methods are taken in id order.
pub fn statement_order(flow: &Graph) -> Vec<NodeId> {
    fn walk(flow: &Graph, node: NodeId, out: &mut Vec<NodeId>) {
        for seq in sequences(flow, node) {
            for stmt in flow.children(seq, "stmts") {
                out.push(stmt);
                walk(flow, stmt, out);
            }
        }
    }
    let mut out = Vec::new();
    for m in methods(flow) {
        walk(flow, m, &mut out);
    }
    out
}

/// Stored `cfNext` target of a node.
pub fn cf_next(flow: &Graph, node: NodeId) -> Option<NodeId> {
    flow.outgoing(node).find(|e| e.ty == "cfNext").map(|e| e.target)
}

/// Every control-flow edge: stored `cfNext` plus the entries into method
/// bodies, branches and loop bodies, and loop back edges.
pub fn control_flow_edges(flow: &Graph) -> BTreeSet<(NodeId, NodeId)> {
    let mut out = BTreeSet::new();
    for n in flow.nodes() {
        let next = cf_next(flow, n.id);
        let succs: Vec<Option<NodeId>> = match n.ty.as_str() {
            "Method" => vec![first_statement(flow, n.id, "body")
                .or_else(|| flow.children(n.id, "exit").first().copied())],
            "If" => vec![
                first_statement(flow, n.id, "then").or(next),
                first_statement(flow, n.id, "else").or(next),
            ],
            "Loop" => vec![first_statement(flow, n.id, "body").or(Some(n.id)), next],
            "Exit" | "Seq" => vec![],
            _ => vec![next],
        };
        out.extend(succs.into_iter().flatten().map(|s| (n.id, s)));
    }
    out
}
