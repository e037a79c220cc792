use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::graph::{Diagnostic, Graph, GraphError};
use super::ids::{CorrId, NodeId};
use super::metamodel::{Metamodel, MetamodelError};

/// A correspondence type: links a source node type to a target node type.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorrType {
    pub name: String,
    pub source: String,
    pub target: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub supertype: Option<String>,
    #[serde(default, rename = "abstract", skip_serializing_if = "std::ops::Not::not")]
    pub is_abstract: bool,
}

impl CorrType {
    pub fn new(name: &str, source: &str, target: &str) -> Self {
        CorrType {
            name: name.to_string(),
            source: source.to_string(),
            target: target.to_string(),
            supertype: None,
            is_abstract: false,
        }
    }

    pub fn extends(mut self, supertype: &str) -> Self {
        self.supertype = Some(supertype.to_string());
        self
    }

    pub fn abstract_type(mut self) -> Self {
        self.is_abstract = true;
        self
    }
}

/// The correspondence metamodel of a TGG schema.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawCorrMetamodel", into = "RawCorrMetamodel")]
pub struct CorrMetamodel {
    name: String,
    types: Vec<CorrType>,
}

#[derive(Serialize, Deserialize)]
struct RawCorrMetamodel {
    name: String,
    corr_types: Vec<CorrType>,
}

impl TryFrom<RawCorrMetamodel> for CorrMetamodel {
    type Error = MetamodelError;

    fn try_from(raw: RawCorrMetamodel) -> Result<Self, Self::Error> {
        CorrMetamodel::new(&raw.name, raw.corr_types)
    }
}

impl From<CorrMetamodel> for RawCorrMetamodel {
    fn from(mm: CorrMetamodel) -> Self {
        RawCorrMetamodel {
            name: mm.name,
            corr_types: mm.types,
        }
    }
}

impl CorrMetamodel {
    pub fn new(name: &str, types: Vec<CorrType>) -> Result<Self, MetamodelError> {
        let mut seen = BTreeSet::new();
        for ct in &types {
            if !seen.insert(ct.name.as_str()) {
                return Err(MetamodelError::DuplicateType {
                    metamodel: name.to_string(),
                    name: ct.name.clone(),
                });
            }
        }
        let mm = CorrMetamodel {
            name: name.to_string(),
            types,
        };
        for ct in &mm.types {
            let mut steps = 0;
            let mut cur = ct;
            while let Some(sup) = &cur.supertype {
                steps += 1;
                if steps > mm.types.len() {
                    return Err(MetamodelError::CyclicSupertype {
                        metamodel: mm.name.clone(),
                        ty: ct.name.clone(),
                    });
                }
                cur = mm.corr_type(sup).ok_or_else(|| MetamodelError::UnknownSupertype {
                    metamodel: mm.name.clone(),
                    ty: cur.name.clone(),
                    supertype: sup.clone(),
                })?;
            }
        }
        Ok(mm)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn types(&self) -> &[CorrType] {
        &self.types
    }

    pub fn corr_type(&self, name: &str) -> Option<&CorrType> {
        self.types.iter().find(|t| t.name == name)
    }

    pub fn is_subtype(&self, ty: &str, ancestor: &str) -> bool {
        let mut cur = self.corr_type(ty);
        while let Some(ct) = cur {
            if ct.name == ancestor {
                return true;
            }
            cur = ct.supertype.as_deref().and_then(|s| self.corr_type(s));
        }
        false
    }

    /// Every corr endpoint type must be declared in the matching domain metamodel.
    pub fn check_against(&self, source: &Metamodel, target: &Metamodel) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        for ct in &self.types {
            if source.node_type(&ct.source).is_none() {
                out.push(Diagnostic::new(
                    format!("corr type {}", ct.name),
                    format!("source type `{}` not in `{}`", ct.source, source.name()),
                ));
            }
            if target.node_type(&ct.target).is_none() {
                out.push(Diagnostic::new(
                    format!("corr type {}", ct.name),
                    format!("target type `{}` not in `{}`", ct.target, target.name()),
                ));
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorrLink {
    pub id: CorrId,
    #[serde(rename = "type")]
    pub ty: String,
    #[serde(rename = "src")]
    pub source: NodeId,
    #[serde(rename = "tgt")]
    pub target: NodeId,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TripleError {
    #[error("unknown correspondence type `{0}`")]
    UnknownCorrType(String),
    #[error("correspondence type `{0}` is abstract")]
    AbstractCorrType(String),
    #[error("correspondence `{ty}` expects {side} `{expected}`, node {node} is `{found}`")]
    EndpointMismatch {
        ty: String,
        side: &'static str,
        expected: String,
        node: NodeId,
        found: String,
    },
    #[error("{side} node {node} does not exist")]
    MissingEndpoint { side: &'static str, node: NodeId },
    #[error("unknown correspondence {0}")]
    UnknownCorr(CorrId),
    #[error("node {0} is still referenced by correspondence links")]
    NodeHasCorrs(NodeId),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Source graph, target graph, and the correspondence links between them.
#[derive(Debug, Clone)]
pub struct TripleModel {
    pub source: Graph,
    pub target: Graph,
    corr_mm: Arc<CorrMetamodel>,
    corrs: BTreeMap<CorrId, CorrLink>,
    by_source: HashMap<NodeId, BTreeSet<CorrId>>,
    by_target: HashMap<NodeId, BTreeSet<CorrId>>,
    next_corr: u32,
}

impl TripleModel {
    pub fn new(source: Graph, target: Graph, corr_mm: Arc<CorrMetamodel>) -> Self {
        TripleModel {
            source,
            target,
            corr_mm,
            corrs: BTreeMap::new(),
            by_source: HashMap::new(),
            by_target: HashMap::new(),
            next_corr: 0,
        }
    }

    pub fn corr_metamodel(&self) -> &Arc<CorrMetamodel> {
        &self.corr_mm
    }

    pub fn corrs(&self) -> impl Iterator<Item = &CorrLink> {
        self.corrs.values()
    }

    pub fn corr(&self, id: CorrId) -> Option<&CorrLink> {
        self.corrs.get(&id)
    }

    pub fn corr_count(&self) -> usize {
        self.corrs.len()
    }

    /// Corr links whose source endpoint is `node`, in id order.
    pub fn corrs_from_source(&self, node: NodeId) -> Vec<&CorrLink> {
        self.by_source
            .get(&node)
            .into_iter()
            .flatten()
            .map(|c| &self.corrs[c])
            .collect()
    }

    /// Corr links whose target endpoint is `node`, in id order.
    pub fn corrs_from_target(&self, node: NodeId) -> Vec<&CorrLink> {
        self.by_target
            .get(&node)
            .into_iter()
            .flatten()
            .map(|c| &self.corrs[c])
            .collect()
    }

    pub fn add_corr(&mut self, ty: &str, source: NodeId, target: NodeId) -> Result<CorrId, TripleError> {
        let id = CorrId(self.next_corr);
        self.insert_corr(id, ty, source, target)?;
        Ok(id)
    }

    pub(crate) fn insert_corr(
        &mut self,
        id: CorrId,
        ty: &str,
        source: NodeId,
        target: NodeId,
    ) -> Result<(), TripleError> {
        let ct = self
            .corr_mm
            .corr_type(ty)
            .ok_or_else(|| TripleError::UnknownCorrType(ty.to_string()))?;
        if ct.is_abstract {
            return Err(TripleError::AbstractCorrType(ty.to_string()));
        }
        for (side, graph, node, expected) in [
            ("source", &self.source, source, &ct.source),
            ("target", &self.target, target, &ct.target),
        ] {
            let found = graph
                .node_type(node)
                .ok_or(TripleError::MissingEndpoint { side, node })?;
            if !graph.metamodel().is_subtype(found, expected) {
                return Err(TripleError::EndpointMismatch {
                    ty: ty.to_string(),
                    side,
                    expected: expected.clone(),
                    node,
                    found: found.to_string(),
                });
            }
        }
        self.corrs.insert(
            id,
            CorrLink {
                id,
                ty: ty.to_string(),
                source,
                target,
            },
        );
        self.by_source.entry(source).or_default().insert(id);
        self.by_target.entry(target).or_default().insert(id);
        self.next_corr = self.next_corr.max(id.0 + 1);
        Ok(())
    }

    pub fn remove_corr(&mut self, id: CorrId) -> Result<CorrLink, TripleError> {
        let link = self.corrs.remove(&id).ok_or(TripleError::UnknownCorr(id))?;
        if let Some(s) = self.by_source.get_mut(&link.source) {
            s.remove(&id);
        }
        if let Some(s) = self.by_target.get_mut(&link.target) {
            s.remove(&id);
        }
        Ok(link)
    }

    /// Remove a source node; its corr links and edges must already be gone.
    pub fn remove_source_node(&mut self, node: NodeId) -> Result<(), TripleError> {
        if self.by_source.get(&node).is_some_and(|s| !s.is_empty()) {
            return Err(TripleError::NodeHasCorrs(node));
        }
        self.source.remove_node(node)?;
        Ok(())
    }

    /// Remove a target node; its corr links and edges must already be gone.
    pub fn remove_target_node(&mut self, node: NodeId) -> Result<(), TripleError> {
        if self.by_target.get(&node).is_some_and(|s| !s.is_empty()) {
            return Err(TripleError::NodeHasCorrs(node));
        }
        self.target.remove_node(node)?;
        Ok(())
    }

    /// Conformance of both graphs plus corr endpoint resolution and typing.
    pub fn conforms(&self) -> Vec<Diagnostic> {
        let mut diags: Vec<Diagnostic> = self
            .source
            .conforms()
            .into_iter()
            .map(|d| Diagnostic::new(format!("source {}", d.location), d.message))
            .collect();
        diags.extend(
            self.target
                .conforms()
                .into_iter()
                .map(|d| Diagnostic::new(format!("target {}", d.location), d.message)),
        );
        for link in self.corrs.values() {
            let loc = format!("corr {}", link.id);
            let Some(ct) = self.corr_mm.corr_type(&link.ty) else {
                diags.push(Diagnostic::new(loc, format!("undeclared corr type `{}`", link.ty)));
                continue;
            };
            for (side, graph, node, expected) in [
                ("source", &self.source, link.source, &ct.source),
                ("target", &self.target, link.target, &ct.target),
            ] {
                match graph.node_type(node) {
                    None => diags.push(Diagnostic::new(&loc, format!("dangling {side} {node}"))),
                    Some(found) if !graph.metamodel().is_subtype(found, expected) => diags.push(
                        Diagnostic::new(&loc, format!("{side} {node} is `{found}`, expected `{expected}`")),
                    ),
                    Some(_) => {}
                }
            }
        }
        diags
    }
}
