use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use super::ids::{EdgeId, NodeId};
use super::metamodel::Metamodel;
use super::value::{AttrKind, Value};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Node {
    pub id: NodeId,
    pub ty: String,
    pub attrs: BTreeMap<String, Value>,
}

impl Node {
    pub fn attr(&self, name: &str) -> Option<&Value> {
        self.attrs.get(name)
    }

    pub fn str_attr(&self, name: &str) -> Option<&str> {
        self.attrs.get(name).and_then(Value::as_str)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub id: EdgeId,
    pub ty: String,
    pub source: NodeId,
    pub target: NodeId,
    pub position: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("unknown node type `{0}`")]
    UnknownNodeType(String),
    #[error("node type `{0}` is abstract")]
    AbstractType(String),
    #[error("attribute `{attr}` is not declared on `{ty}`")]
    UndeclaredAttribute { ty: String, attr: String },
    #[error("attribute `{attr}` expects {expected}, got {found}")]
    KindMismatch { attr: String, expected: AttrKind, found: AttrKind },
    #[error("unknown edge type `{0}`")]
    UnknownEdgeType(String),
    #[error("edge endpoint {0} does not exist")]
    DanglingEndpoint(NodeId),
    #[error("edge `{edge}` expects {end} of type `{expected}`, node {node} is `{found}`")]
    EndpointTypeMismatch {
        edge: String,
        end: &'static str,
        expected: String,
        node: NodeId,
        found: String,
    },
    #[error("ordered edge type `{0}` requires a position")]
    MissingPosition(String),
    #[error("unordered edge type `{0}` does not take a position")]
    UnexpectedPosition(String),
    #[error("position {position} already used by a `{ty}` edge from {owner}")]
    DuplicateOrdinal { ty: String, owner: NodeId, position: u32 },
    #[error("gap in ordinals of `{ty}` edges from {owner}: next free position is {expected}, got {found}")]
    GapInOrdinals { ty: String, owner: NodeId, expected: u32, found: u32 },
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    #[error("unknown edge {0}")]
    UnknownEdge(EdgeId),
    #[error("node {0} still has incident edges")]
    NodeHasEdges(NodeId),
}

/// One located conformance violation.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Diagnostic {
    pub location: String,
    pub message: String,
}

impl Diagnostic {
    pub fn new(location: impl Into<String>, message: impl Into<String>) -> Self {
        Diagnostic {
            location: location.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.location, self.message)
    }
}

/// A typed attributed graph. Ids are allocated in creation order and never reused.
#[derive(Debug, Clone)]
pub struct Graph {
    metamodel: Arc<Metamodel>,
    nodes: BTreeMap<NodeId, Node>,
    edges: BTreeMap<EdgeId, Edge>,
    out_edges: BTreeMap<NodeId, BTreeSet<EdgeId>>,
    in_edges: BTreeMap<NodeId, BTreeSet<EdgeId>>,
    next_node: u32,
    next_edge: u32,
}

impl Graph {
    pub fn new(metamodel: Arc<Metamodel>) -> Self {
        Graph {
            metamodel,
            nodes: BTreeMap::new(),
            edges: BTreeMap::new(),
            out_edges: BTreeMap::new(),
            in_edges: BTreeMap::new(),
            next_node: 0,
            next_edge: 0,
        }
    }

    pub fn metamodel(&self) -> &Arc<Metamodel> {
        &self.metamodel
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn node(&self, id: NodeId) -> Option<&Node> {
        self.nodes.get(&id)
    }

    pub fn edge(&self, id: EdgeId) -> Option<&Edge> {
        self.edges.get(&id)
    }

    pub fn nodes(&self) -> impl Iterator<Item = &Node> {
        self.nodes.values()
    }

    pub fn edges(&self) -> impl Iterator<Item = &Edge> {
        self.edges.values()
    }

    pub fn node_type(&self, id: NodeId) -> Option<&str> {
        self.nodes.get(&id).map(|n| n.ty.as_str())
    }

    /// Outgoing edges in id order.
    pub fn outgoing(&self, id: NodeId) -> impl Iterator<Item = &Edge> {
        self.out_edges
            .get(&id)
            .into_iter()
            .flatten()
            .map(move |e| &self.edges[e])
    }

    /// Incoming edges in id order.
    pub fn incoming(&self, id: NodeId) -> impl Iterator<Item = &Edge> {
        self.in_edges
            .get(&id)
            .into_iter()
            .flatten()
            .map(move |e| &self.edges[e])
    }

    /// Targets of `ty` edges leaving `id`, in ordinal order (id order for unordered types).
    pub fn children(&self, id: NodeId, ty: &str) -> Vec<NodeId> {
        let mut out: Vec<&Edge> = self.outgoing(id).filter(|e| e.ty == ty).collect();
        out.sort_by_key(|e| (e.position, e.id));
        out.into_iter().map(|e| e.target).collect()
    }

    /// Source of the first incoming containment edge, with that edge.
    pub fn container(&self, id: NodeId) -> Option<&Edge> {
        self.incoming(id).find(|e| {
            self.metamodel
                .edge_type(&e.ty)
                .is_some_and(|et| et.containment)
        })
    }

    pub fn add_node<K, I>(&mut self, ty: &str, attrs: I) -> Result<NodeId, GraphError>
    where
        K: Into<String>,
        I: IntoIterator<Item = (K, Value)>,
    {
        let id = NodeId(self.next_node);
        self.insert_node(id, ty, attrs)?;
        Ok(id)
    }

    /// Insert a node under a caller-chosen id (used when loading serialized graphs).
    pub(crate) fn insert_node<K, I>(&mut self, id: NodeId, ty: &str, attrs: I) -> Result<(), GraphError>
    where
        K: Into<String>,
        I: IntoIterator<Item = (K, Value)>,
    {
        let nt = self
            .metamodel
            .node_type(ty)
            .ok_or_else(|| GraphError::UnknownNodeType(ty.to_string()))?;
        if nt.is_abstract {
            return Err(GraphError::AbstractType(ty.to_string()));
        }
        let mut map = BTreeMap::new();
        for (k, v) in attrs {
            let k = k.into();
            self.check_attr(ty, &k, &v)?;
            map.insert(k, v);
        }
        self.nodes.insert(
            id,
            Node {
                id,
                ty: ty.to_string(),
                attrs: map,
            },
        );
        self.next_node = self.next_node.max(id.0 + 1);
        Ok(())
    }

    fn check_attr(&self, ty: &str, attr: &str, value: &Value) -> Result<(), GraphError> {
        let expected = self.metamodel.attribute_kind(ty, attr).ok_or_else(|| {
            GraphError::UndeclaredAttribute {
                ty: ty.to_string(),
                attr: attr.to_string(),
            }
        })?;
        if expected != value.kind() {
            return Err(GraphError::KindMismatch {
                attr: attr.to_string(),
                expected,
                found: value.kind(),
            });
        }
        Ok(())
    }

    pub fn set_attr(&mut self, id: NodeId, attr: &str, value: Value) -> Result<(), GraphError> {
        let ty = self
            .nodes
            .get(&id)
            .ok_or(GraphError::UnknownNode(id))?
            .ty
            .clone();
        self.check_attr(&ty, attr, &value)?;
        self.nodes
            .get_mut(&id)
            .expect("checked above")
            .attrs
            .insert(attr.to_string(), value);
        Ok(())
    }

    /// Add an edge. Ordered edge types must receive the next free ordinal of their group.
    pub fn add_edge(
        &mut self,
        ty: &str,
        source: NodeId,
        target: NodeId,
        position: Option<u32>,
    ) -> Result<EdgeId, GraphError> {
        let id = EdgeId(self.next_edge);
        self.insert_edge(id, ty, source, target, position, true)?;
        Ok(id)
    }

    /// Like [`Graph::add_edge`] but accepts ordinals out of order; only duplicates are
    /// rejected. Contiguity is left to [`Graph::conforms`]. Rule application fills
    /// sibling positions in dependency order, not ordinal order.
    pub fn add_edge_unordered_fill(
        &mut self,
        ty: &str,
        source: NodeId,
        target: NodeId,
        position: Option<u32>,
    ) -> Result<EdgeId, GraphError> {
        let id = EdgeId(self.next_edge);
        self.insert_edge(id, ty, source, target, position, false)?;
        Ok(id)
    }

    pub(crate) fn insert_edge(
        &mut self,
        id: EdgeId,
        ty: &str,
        source: NodeId,
        target: NodeId,
        position: Option<u32>,
        strict_ordinals: bool,
    ) -> Result<(), GraphError> {
        let et = self
            .metamodel
            .edge_type(ty)
            .ok_or_else(|| GraphError::UnknownEdgeType(ty.to_string()))?;
        for (end, node, expected) in [("source", source, &et.source), ("target", target, &et.target)] {
            let n = self.nodes.get(&node).ok_or(GraphError::DanglingEndpoint(node))?;
            if !self.metamodel.is_subtype(&n.ty, expected) {
                return Err(GraphError::EndpointTypeMismatch {
                    edge: ty.to_string(),
                    end,
                    expected: expected.clone(),
                    node,
                    found: n.ty.clone(),
                });
            }
        }
        match (et.ordered, position) {
            (true, None) => return Err(GraphError::MissingPosition(ty.to_string())),
            (false, Some(_)) => return Err(GraphError::UnexpectedPosition(ty.to_string())),
            (true, Some(pos)) => {
                let taken: BTreeSet<u32> = self
                    .outgoing(source)
                    .filter(|e| e.ty == ty)
                    .filter_map(|e| e.position)
                    .collect();
                if taken.contains(&pos) {
                    return Err(GraphError::DuplicateOrdinal {
                        ty: ty.to_string(),
                        owner: source,
                        position: pos,
                    });
                }
                let next = taken.len() as u32;
                if strict_ordinals && pos != next {
                    return Err(GraphError::GapInOrdinals {
                        ty: ty.to_string(),
                        owner: source,
                        expected: next,
                        found: pos,
                    });
                }
            }
            (false, None) => {}
        }
        self.edges.insert(
            id,
            Edge {
                id,
                ty: ty.to_string(),
                source,
                target,
                position,
            },
        );
        self.out_edges.entry(source).or_default().insert(id);
        self.in_edges.entry(target).or_default().insert(id);
        self.next_edge = self.next_edge.max(id.0 + 1);
        Ok(())
    }

    pub fn remove_edge(&mut self, id: EdgeId) -> Result<Edge, GraphError> {
        let edge = self.edges.remove(&id).ok_or(GraphError::UnknownEdge(id))?;
        if let Some(s) = self.out_edges.get_mut(&edge.source) {
            s.remove(&id);
        }
        if let Some(s) = self.in_edges.get_mut(&edge.target) {
            s.remove(&id);
        }
        Ok(edge)
    }

    /// Remove a node that no longer has incident edges.
    pub fn remove_node(&mut self, id: NodeId) -> Result<Node, GraphError> {
        if !self.nodes.contains_key(&id) {
            return Err(GraphError::UnknownNode(id));
        }
        let busy = |m: &BTreeMap<NodeId, BTreeSet<EdgeId>>| m.get(&id).is_some_and(|s| !s.is_empty());
        if busy(&self.out_edges) || busy(&self.in_edges) {
            return Err(GraphError::NodeHasEdges(id));
        }
        self.out_edges.remove(&id);
        self.in_edges.remove(&id);
        Ok(self.nodes.remove(&id).expect("checked above"))
    }

    /// All violations of type, attribute, endpoint and ordinal invariants.
    pub fn conforms(&self) -> Vec<Diagnostic> {
        let mm = &self.metamodel;
        let mut diags = Vec::new();
        for node in self.nodes.values() {
            let loc = format!("node {}", node.id);
            let Some(nt) = mm.node_type(&node.ty) else {
                diags.push(Diagnostic::new(loc, format!("undeclared type `{}`", node.ty)));
                continue;
            };
            if nt.is_abstract {
                diags.push(Diagnostic::new(&loc, format!("instance of abstract type `{}`", node.ty)));
            }
            for (k, v) in &node.attrs {
                if let Err(e) = self.check_attr(&node.ty, k, v) {
                    diags.push(Diagnostic::new(&loc, e.to_string()));
                }
            }
        }
        let mut groups: BTreeMap<(NodeId, &str), Vec<u32>> = BTreeMap::new();
        for edge in self.edges.values() {
            let loc = format!("edge {}", edge.id);
            let Some(et) = mm.edge_type(&edge.ty) else {
                diags.push(Diagnostic::new(loc, format!("undeclared edge type `{}`", edge.ty)));
                continue;
            };
            for (end, node, expected) in [("source", edge.source, &et.source), ("target", edge.target, &et.target)] {
                match self.nodes.get(&node) {
                    None => diags.push(Diagnostic::new(&loc, format!("dangling {end} {node}"))),
                    Some(n) if !mm.is_subtype(&n.ty, expected) => diags.push(Diagnostic::new(
                        &loc,
                        format!("{end} {node} is `{}`, expected `{expected}`", n.ty),
                    )),
                    Some(_) => {}
                }
            }
            match (et.ordered, edge.position) {
                (true, Some(p)) => groups.entry((edge.source, edge.ty.as_str())).or_default().push(p),
                (true, None) => diags.push(Diagnostic::new(&loc, "ordered edge without position")),
                (false, Some(_)) => diags.push(Diagnostic::new(&loc, "unordered edge with position")),
                (false, None) => {}
            }
        }
        for ((source, ty), mut positions) in groups {
            positions.sort_unstable();
            let contiguous = positions.iter().enumerate().all(|(i, &p)| p == i as u32);
            if !contiguous {
                diags.push(Diagnostic::new(
                    format!("node {source}"),
                    format!("`{ty}` ordinals {positions:?} are not 0..{}", positions.len()),
                ));
            }
        }
        diags
    }

    /// Nodes in containment preorder: roots by id, children by (edge type, position, id).
    pub fn containment_preorder(&self) -> Vec<NodeId> {
        let mut out = Vec::with_capacity(self.nodes.len());
        let mut visited = BTreeSet::new();
        let roots: Vec<NodeId> = self
            .nodes
            .keys()
            .copied()
            .filter(|&n| self.container(n).is_none())
            .collect();
        for root in roots {
            self.preorder_from(root, &mut visited, &mut out);
        }
        // Containment cycles leave nodes unreached; append them in id order.
        for &n in self.nodes.keys() {
            if !visited.contains(&n) {
                self.preorder_from(n, &mut visited, &mut out);
            }
        }
        out
    }

    fn preorder_from(&self, root: NodeId, visited: &mut BTreeSet<NodeId>, out: &mut Vec<NodeId>) {
        let mut stack = vec![root];
        while let Some(n) = stack.pop() {
            if !visited.insert(n) {
                continue;
            }
            out.push(n);
            let mut kids: Vec<&Edge> = self
                .outgoing(n)
                .filter(|e| {
                    self.metamodel
                        .edge_type(&e.ty)
                        .is_some_and(|et| et.containment)
                })
                .collect();
            kids.sort_by_key(|e| (self.metamodel.edge_type_rank(&e.ty), e.position, e.id));
            for e in kids.into_iter().rev() {
                stack.push(e.target);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::metamodel::{EdgeType, NodeType};

    fn tree_mm() -> Arc<Metamodel> {
        Arc::new(
            Metamodel::new(
                "t",
                vec![
                    NodeType::new("N").attr("txt", AttrKind::String),
                    NodeType::new("Abs").abstract_type(),
                ],
                vec![
                    EdgeType::new("child", "N", "N").ordered().containment(),
                    EdgeType::new("next", "N", "N"),
                ],
            )
            .unwrap(),
        )
    }

    #[test]
    fn distinct_attribute_errors() {
        let mut g = Graph::new(tree_mm());
        assert_eq!(
            g.add_node("Nope", Vec::<(String, Value)>::new()),
            Err(GraphError::UnknownNodeType("Nope".into()))
        );
        assert!(matches!(
            g.add_node("N", [("bogus", Value::from("x"))]),
            Err(GraphError::UndeclaredAttribute { .. })
        ));
        assert!(matches!(
            g.add_node("N", [("txt", Value::Int(1))]),
            Err(GraphError::KindMismatch { .. })
        ));
        assert_eq!(
            g.add_node("Abs", Vec::<(String, Value)>::new()),
            Err(GraphError::AbstractType("Abs".into()))
        );
    }

    #[test]
    fn ordinal_rules() {
        let mut g = Graph::new(tree_mm());
        let a = g.add_node("N", Vec::<(String, Value)>::new()).unwrap();
        let b = g.add_node("N", Vec::<(String, Value)>::new()).unwrap();
        let c = g.add_node("N", Vec::<(String, Value)>::new()).unwrap();
        assert!(matches!(g.add_edge("child", a, b, None), Err(GraphError::MissingPosition(_))));
        assert!(matches!(g.add_edge("next", a, b, Some(0)), Err(GraphError::UnexpectedPosition(_))));
        g.add_edge("child", a, b, Some(0)).unwrap();
        assert!(matches!(g.add_edge("child", a, c, Some(0)), Err(GraphError::DuplicateOrdinal { .. })));
        assert!(matches!(g.add_edge("child", a, c, Some(2)), Err(GraphError::GapInOrdinals { .. })));
        g.add_edge_unordered_fill("child", a, c, Some(2)).unwrap();
        assert_eq!(g.conforms().len(), 1);
    }

    #[test]
    fn remove_node_requires_detached() {
        let mut g = Graph::new(tree_mm());
        let a = g.add_node("N", Vec::<(String, Value)>::new()).unwrap();
        let b = g.add_node("N", Vec::<(String, Value)>::new()).unwrap();
        let e = g.add_edge("next", a, b, None).unwrap();
        assert_eq!(g.remove_node(b), Err(GraphError::NodeHasEdges(b)));
        g.remove_edge(e).unwrap();
        g.remove_node(b).unwrap();
        assert!(g.conforms().is_empty());
    }

    #[test]
    fn preorder_follows_ordinals() {
        let mut g = Graph::new(tree_mm());
        let none = Vec::<(String, Value)>::new;
        let r = g.add_node("N", none()).unwrap();
        let x = g.add_node("N", none()).unwrap();
        let y = g.add_node("N", none()).unwrap();
        let z = g.add_node("N", none()).unwrap();
        g.add_edge_unordered_fill("child", r, y, Some(1)).unwrap();
        g.add_edge_unordered_fill("child", r, x, Some(0)).unwrap();
        g.add_edge("child", x, z, Some(0)).unwrap();
        assert_eq!(g.containment_preorder(), vec![r, x, z, y]);
    }
}
