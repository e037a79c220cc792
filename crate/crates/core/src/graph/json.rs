//! JSON interchange for graphs and triples.
//!
//! Graph: `{metamodel, nodes:[{id,type,attrs}], edges:[{id,type,src,tgt,pos?}]}`.
//! Triple: `{corr_metamodel, source:<graph>, target:<graph>, corrs:[{id,type,src,tgt}]}`.
//! Arrays are emitted in id order and keys in a fixed order, so output is byte-stable.

use std::collections::{BTreeMap, HashSet};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::graph::{Graph, GraphError};
use super::ids::{CorrId, EdgeId, NodeId};
use super::metamodel::Metamodel;
use super::triple::{CorrLink, CorrMetamodel, TripleError, TripleModel};
use super::value::Value;

#[derive(Debug, Error)]
pub enum JsonError {
    #[error("malformed JSON: {0}")]
    Syntax(#[from] serde_json::Error),
    #[error("unknown metamodel `{0}`")]
    UnknownMetamodel(String),
    #[error("duplicate id {0}")]
    DuplicateId(String),
    #[error("{0}")]
    Graph(#[from] GraphError),
    #[error("{0}")]
    Triple(#[from] TripleError),
}

/// Metamodels addressable by name from serialized documents.
#[derive(Debug, Clone, Default)]
pub struct MetamodelCatalog {
    graphs: BTreeMap<String, Arc<Metamodel>>,
    corrs: BTreeMap<String, Arc<CorrMetamodel>>,
}

impl MetamodelCatalog {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_graph(&mut self, mm: Arc<Metamodel>) {
        self.graphs.insert(mm.name().to_string(), mm);
    }

    pub fn add_corr(&mut self, mm: Arc<CorrMetamodel>) {
        self.corrs.insert(mm.name().to_string(), mm);
    }

    pub fn graph(&self, name: &str) -> Option<&Arc<Metamodel>> {
        self.graphs.get(name)
    }

    pub fn corr(&self, name: &str) -> Option<&Arc<CorrMetamodel>> {
        self.corrs.get(name)
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub(crate) struct GraphDoc {
    metamodel: String,
    nodes: Vec<NodeDoc>,
    edges: Vec<EdgeDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
struct NodeDoc {
    id: NodeId,
    #[serde(rename = "type")]
    ty: String,
    #[serde(default)]
    attrs: BTreeMap<String, Value>,
}

#[derive(Debug, Serialize, Deserialize)]
struct EdgeDoc {
    id: EdgeId,
    #[serde(rename = "type")]
    ty: String,
    src: NodeId,
    tgt: NodeId,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pos: Option<u32>,
}

#[derive(Debug, Serialize, Deserialize)]
struct TripleDoc {
    corr_metamodel: String,
    source: GraphDoc,
    target: GraphDoc,
    corrs: Vec<CorrLink>,
}

impl GraphDoc {
    pub(crate) fn from_graph(g: &Graph) -> Self {
        GraphDoc {
            metamodel: g.metamodel().name().to_string(),
            nodes: g
                .nodes()
                .map(|n| NodeDoc {
                    id: n.id,
                    ty: n.ty.clone(),
                    attrs: n.attrs.clone(),
                })
                .collect(),
            edges: g
                .edges()
                .map(|e| EdgeDoc {
                    id: e.id,
                    ty: e.ty.clone(),
                    src: e.source,
                    tgt: e.target,
                    pos: e.position,
                })
                .collect(),
        }
    }

    pub(crate) fn into_graph(self, catalog: &MetamodelCatalog) -> Result<Graph, JsonError> {
        let mm = catalog
            .graph(&self.metamodel)
            .ok_or_else(|| JsonError::UnknownMetamodel(self.metamodel.clone()))?;
        let mut g = Graph::new(mm.clone());
        let mut seen = HashSet::new();
        for n in self.nodes {
            if !seen.insert(n.id) {
                return Err(JsonError::DuplicateId(n.id.to_string()));
            }
            g.insert_node(n.id, &n.ty, n.attrs)?;
        }
        let mut seen = HashSet::new();
        for e in self.edges {
            if !seen.insert(e.id) {
                return Err(JsonError::DuplicateId(e.id.to_string()));
            }
            g.insert_edge(e.id, &e.ty, e.src, e.tgt, e.pos, false)?;
        }
        Ok(g)
    }
}

pub fn graph_to_json(g: &Graph) -> String {
    let mut s = serde_json::to_string_pretty(&GraphDoc::from_graph(g)).expect("graph serializes");
    s.push('\n');
    s
}

pub fn graph_from_json(text: &str, catalog: &MetamodelCatalog) -> Result<Graph, JsonError> {
    let doc: GraphDoc = serde_json::from_str(text)?;
    doc.into_graph(catalog)
}

pub fn triple_to_json(t: &TripleModel) -> String {
    let doc = TripleDoc {
        corr_metamodel: t.corr_metamodel().name().to_string(),
        source: GraphDoc::from_graph(&t.source),
        target: GraphDoc::from_graph(&t.target),
        corrs: t.corrs().cloned().collect(),
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("triple serializes");
    s.push('\n');
    s
}

pub fn triple_from_json(text: &str, catalog: &MetamodelCatalog) -> Result<TripleModel, JsonError> {
    let doc: TripleDoc = serde_json::from_str(text)?;
    let corr_mm = catalog
        .corr(&doc.corr_metamodel)
        .ok_or_else(|| JsonError::UnknownMetamodel(doc.corr_metamodel.clone()))?;
    let source = doc.source.into_graph(catalog)?;
    let target = doc.target.into_graph(catalog)?;
    let mut t = TripleModel::new(source, target, corr_mm.clone());
    let mut seen: HashSet<CorrId> = HashSet::new();
    for c in doc.corrs {
        if !seen.insert(c.id) {
            return Err(JsonError::DuplicateId(c.id.to_string()));
        }
        t.insert_corr(c.id, &c.ty, c.source, c.target)?;
    }
    Ok(t)
}
