//! Graphviz rendering of a flow graph, optionally with the AST side and corr links.

use std::fmt::Write;

use crate::flowgraphs::control_flow_edges;
use crate::graph::{Graph, TripleModel};

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out
}

fn is_flow_node(flow: &Graph, ty: &str) -> bool {
    flow.metamodel().is_subtype(ty, "FlowNode")
}

/// Flow nodes labelled by `txt`, solid control-flow edges, dotted `cfPrev`
/// back references. With `corrs`, AST nodes and dashed corr links are added.
pub fn export_dot(triple: &TripleModel, corrs: bool) -> String {
    let flow = &triple.target;
    let mut out = String::from("digraph flowgraph {\n    node [shape=box];\n");
    for n in flow.nodes().filter(|n| is_flow_node(flow, &n.ty)) {
        let txt = n.str_attr("txt").unwrap_or_default();
        writeln!(out, "    t{} [label=\"{}\"];", n.id.index(), escape(txt)).unwrap();
    }
    let edges = control_flow_edges(flow);
    for (from, to) in &edges {
        writeln!(out, "    t{} -> t{} [label=\"cfNext\"];", from.index(), to.index()).unwrap();
    }
    for (from, to) in &edges {
        writeln!(
            out,
            "    t{} -> t{} [label=\"cfPrev\", style=dotted, constraint=false];",
            to.index(), from.index()
        )
        .unwrap();
    }
    if corrs {
        let ast = &triple.source;
        for n in ast.nodes() {
            let label = match n.str_attr("value") {
                Some(v) => format!("{} {v}", n.ty),
                None => n.ty.clone(),
            };
            writeln!(out, "    s{} [label=\"{}\", shape=ellipse];", n.id.index(), escape(&label)).unwrap();
        }
        for e in ast.edges() {
            writeln!(out, "    s{} -> s{};", e.source.index(), e.target.index()).unwrap();
        }
        for c in triple.corrs() {
            writeln!(
                out,
                "    s{} -> t{} [label=\"{}\", style=dashed, arrowhead=none];",
                c.source.index(),
                c.target.index(),
                escape(&c.ty)
            )
            .unwrap();
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flowgraphs::{corr_metamodel, flow_metamodel};
    use crate::graph::Value;

    fn empty() -> TripleModel {
        TripleModel::new(
            Graph::new(crate::flowgraphs::ast_metamodel()),
            Graph::new(flow_metamodel()),
            corr_metamodel(),
        )
    }

    #[test]
    fn empty_graph_is_header_only() {
        assert_eq!(export_dot(&empty(), false), "digraph flowgraph {\n    node [shape=box];\n}\n");
    }

    #[test]
    fn quotes_are_escaped() {
        let mut t = empty();
        t.target
            .add_node("SimpleStmt", [("txt", Value::from("s = \"x\";"))])
            .unwrap();
        assert!(export_dot(&t, false).contains(r#"[label="s = \"x\";"]"#));
    }
}
