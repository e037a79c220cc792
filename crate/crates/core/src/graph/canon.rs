//! Id-independent canonical text for containment-structured graphs.
//!
//! Two graphs with equal canonical text are isomorphic. Nodes are numbered in a
//! preorder whose sibling order depends only on content, so allocation order and
//! ids never leak into the result.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write;

use super::graph::Graph;
use super::ids::NodeId;
use super::triple::TripleModel;

fn label(g: &Graph, id: NodeId) -> String {
    let n = g.node(id).expect("node exists");
    let mut s = n.ty.clone();
    if !n.attrs.is_empty() {
        s.push('{');
        for (i, (k, v)) in n.attrs.iter().enumerate() {
            if i > 0 {
                s.push(',');
            }
            let _ = write!(s, "{k}={v}");
        }
        s.push('}');
    }
    s
}

struct Canon {
    subtree: HashMap<NodeId, String>,
    order: Vec<NodeId>,
}

fn is_containment(g: &Graph, ty: &str) -> bool {
    g.metamodel().edge_type(ty).is_some_and(|et| et.containment)
}

fn sorted_children(g: &Graph, id: NodeId, subtree: &HashMap<NodeId, String>) -> Vec<(String, NodeId)> {
    let mut kids: Vec<(usize, Option<u32>, String, NodeId)> = g
        .outgoing(id)
        .filter(|e| is_containment(g, &e.ty))
        .map(|e| {
            (
                g.metamodel().edge_type_rank(&e.ty),
                e.position,
                format!("{}#{:?}:{}", e.ty, e.position, subtree[&e.target]),
                e.target,
            )
        })
        .collect();
    kids.sort();
    kids.into_iter().map(|(_, _, s, n)| (s, n)).collect()
}

fn canon(g: &Graph) -> Canon {
    // Children before parents: reverse preorder visits every child first.
    let pre = g.containment_preorder();
    let mut subtree: HashMap<NodeId, String> = HashMap::new();
    for &id in pre.iter().rev() {
        let mut s = label(g, id);
        let kids = sorted_children(g, id, &subtree);
        if !kids.is_empty() {
            s.push('[');
            let parts: Vec<String> = kids.into_iter().map(|(k, _)| k).collect();
            s.push_str(&parts.join(";"));
            s.push(']');
        }
        subtree.insert(id, s);
    }
    let mut roots: Vec<(String, NodeId)> = pre
        .iter()
        .copied()
        .filter(|&n| g.container(n).is_none())
        .map(|n| (subtree[&n].clone(), n))
        .collect();
    roots.sort();
    let mut order = Vec::new();
    let mut stack: Vec<NodeId> = roots.into_iter().rev().map(|(_, n)| n).collect();
    while let Some(n) = stack.pop() {
        if order.contains(&n) {
            continue;
        }
        order.push(n);
        for (_, k) in sorted_children(g, n, &subtree).into_iter().rev() {
            stack.push(k);
        }
    }
    Canon { subtree, order }
}

fn render(g: &Graph, c: &Canon, out: &mut String) -> BTreeMap<NodeId, usize> {
    let index: BTreeMap<NodeId, usize> = c.order.iter().enumerate().map(|(i, &n)| (n, i)).collect();
    for &n in &c.order {
        if g.container(n).is_none() {
            let _ = writeln!(out, "root {}", c.subtree[&n]);
        }
    }
    let mut cross: Vec<String> = g
        .edges()
        .filter(|e| !is_containment(g, &e.ty))
        .map(|e| format!("{} -{}{:?}-> {}", index[&e.source], e.ty, e.position, index[&e.target]))
        .collect();
    cross.sort();
    for line in cross {
        let _ = writeln!(out, "edge {line}");
    }
    index
}

pub fn canonical_graph(g: &Graph) -> String {
    let c = canon(g);
    let mut out = String::new();
    render(g, &c, &mut out);
    out
}

pub fn canonical_triple(t: &TripleModel) -> String {
    let mut out = String::from("# source\n");
    let src = render(&t.source, &canon(&t.source), &mut out);
    out.push_str("# target\n");
    let tgt = render(&t.target, &canon(&t.target), &mut out);
    let mut corrs: Vec<String> = t
        .corrs()
        .map(|c| format!("{} {} {}", c.ty, src[&c.source], tgt[&c.target]))
        .collect();
    corrs.sort();
    out.push_str("# corrs\n");
    for c in corrs {
        let _ = writeln!(out, "{c}");
    }
    out
}
