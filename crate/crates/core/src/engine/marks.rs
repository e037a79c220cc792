use std::collections::BTreeSet;

use crate::graph::{CorrId, EdgeId, NodeId, TripleModel};
use crate::rules::Domain;

/// Elements already translated, per domain.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Marks {
    pub source_nodes: BTreeSet<NodeId>,
    pub source_edges: BTreeSet<EdgeId>,
    pub target_nodes: BTreeSet<NodeId>,
    pub target_edges: BTreeSet<EdgeId>,
    pub corrs: BTreeSet<CorrId>,
}

impl Marks {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn nodes(&self, domain: Domain) -> &BTreeSet<NodeId> {
        match domain {
            Domain::Target => &self.target_nodes,
            _ => &self.source_nodes,
        }
    }

    pub fn edges(&self, domain: Domain) -> &BTreeSet<EdgeId> {
        match domain {
            Domain::Target => &self.target_edges,
            _ => &self.source_edges,
        }
    }

    pub fn node_marked(&self, domain: Domain, id: NodeId) -> bool {
        self.nodes(domain).contains(&id)
    }

    pub fn edge_marked(&self, domain: Domain, id: EdgeId) -> bool {
        self.edges(domain).contains(&id)
    }

    /// Returns false if the node was already marked.
    pub fn mark_node(&mut self, domain: Domain, id: NodeId) -> bool {
        match domain {
            Domain::Target => self.target_nodes.insert(id),
            _ => self.source_nodes.insert(id),
        }
    }

    pub fn mark_edge(&mut self, domain: Domain, id: EdgeId) -> bool {
        match domain {
            Domain::Target => self.target_edges.insert(id),
            _ => self.source_edges.insert(id),
        }
    }

    pub fn mark_corr(&mut self, id: CorrId) -> bool {
        self.corrs.insert(id)
    }

    /// Unmarked elements of `domain` in `triple`, as display strings (`n3`, `e7`, `c1`).
    pub fn unmarked(&self, triple: &TripleModel, domain: Domain) -> Vec<String> {
        match domain {
            Domain::Corr => triple
                .corrs()
                .filter(|c| !self.corrs.contains(&c.id))
                .map(|c| c.id.to_string())
                .collect(),
            _ => {
                let g = if domain == Domain::Source { &triple.source } else { &triple.target };
                let nodes = g.nodes().filter(|n| !self.node_marked(domain, n.id)).map(|n| n.id.to_string());
                let edges = g.edges().filter(|e| !self.edge_marked(domain, e.id)).map(|e| e.id.to_string());
                nodes.chain(edges).collect()
            }
        }
    }
}
