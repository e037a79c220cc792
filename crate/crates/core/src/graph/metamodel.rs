use std::collections::{BTreeMap, HashMap, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::value::AttrKind;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeType {
    pub name: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub attributes: BTreeMap<String, AttrKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub supertype: Option<String>,
    #[serde(default, rename = "abstract", skip_serializing_if = "std::ops::Not::not")]
    pub is_abstract: bool,
}

impl NodeType {
    pub fn new(name: &str) -> Self {
        NodeType {
            name: name.to_string(),
            attributes: BTreeMap::new(),
            supertype: None,
            is_abstract: false,
        }
    }

    pub fn attr(mut self, name: &str, kind: AttrKind) -> Self {
        self.attributes.insert(name.to_string(), kind);
        self
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

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeType {
    pub name: String,
    pub source: String,
    pub target: String,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub ordered: bool,
    /// Containment edges define the preorder used by the transformation worklist.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub containment: bool,
}

impl EdgeType {
    pub fn new(name: &str, source: &str, target: &str) -> Self {
        EdgeType {
            name: name.to_string(),
            source: source.to_string(),
            target: target.to_string(),
            ordered: false,
            containment: false,
        }
    }

    pub fn ordered(mut self) -> Self {
        self.ordered = true;
        self
    }

    pub fn containment(mut self) -> Self {
        self.containment = true;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetamodelError {
    #[error("metamodel {metamodel}: duplicate type name `{name}`")]
    DuplicateType { metamodel: String, name: String },
    #[error("metamodel {metamodel}: type `{ty}` extends undeclared `{supertype}`")]
    UnknownSupertype { metamodel: String, ty: String, supertype: String },
    #[error("metamodel {metamodel}: supertype chain of `{ty}` is cyclic")]
    CyclicSupertype { metamodel: String, ty: String },
    #[error("metamodel {metamodel}: edge type `{edge}` references undeclared node type `{ty}`")]
    UnknownEndpoint { metamodel: String, edge: String, ty: String },
}

/// Node and edge type declarations for one graph domain.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "RawMetamodel", into = "RawMetamodel")]
pub struct Metamodel {
    name: String,
    node_types: Vec<NodeType>,
    edge_types: Vec<EdgeType>,
    node_index: HashMap<String, usize>,
    edge_index: HashMap<String, usize>,
}

impl PartialEq for Metamodel {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
            && self.node_types == other.node_types
            && self.edge_types == other.edge_types
    }
}

impl Eq for Metamodel {}

#[derive(Serialize, Deserialize)]
struct RawMetamodel {
    name: String,
    node_types: Vec<NodeType>,
    edge_types: Vec<EdgeType>,
}

impl TryFrom<RawMetamodel> for Metamodel {
    type Error = MetamodelError;

    fn try_from(raw: RawMetamodel) -> Result<Self, Self::Error> {
        Metamodel::new(&raw.name, raw.node_types, raw.edge_types)
    }
}

impl From<Metamodel> for RawMetamodel {
    fn from(mm: Metamodel) -> Self {
        RawMetamodel {
            name: mm.name,
            node_types: mm.node_types,
            edge_types: mm.edge_types,
        }
    }
}

impl Metamodel {
    pub fn new(
        name: &str,
        node_types: Vec<NodeType>,
        edge_types: Vec<EdgeType>,
    ) -> Result<Self, MetamodelError> {
        let mut node_index = HashMap::new();
        for (i, nt) in node_types.iter().enumerate() {
            if node_index.insert(nt.name.clone(), i).is_some() {
                return Err(MetamodelError::DuplicateType {
                    metamodel: name.to_string(),
                    name: nt.name.clone(),
                });
            }
        }
        let mut edge_index = HashMap::new();
        for (i, et) in edge_types.iter().enumerate() {
            if edge_index.insert(et.name.clone(), i).is_some() {
                return Err(MetamodelError::DuplicateType {
                    metamodel: name.to_string(),
                    name: et.name.clone(),
                });
            }
            for ty in [&et.source, &et.target] {
                if !node_index.contains_key(ty) {
                    return Err(MetamodelError::UnknownEndpoint {
                        metamodel: name.to_string(),
                        edge: et.name.clone(),
                        ty: ty.clone(),
                    });
                }
            }
        }
        let mm = Metamodel {
            name: name.to_string(),
            node_types,
            edge_types,
            node_index,
            edge_index,
        };
        for nt in &mm.node_types {
            let mut seen = HashSet::new();
            let mut cur = nt;
            while let Some(sup) = &cur.supertype {
                if !seen.insert(cur.name.as_str()) {
                    return Err(MetamodelError::CyclicSupertype {
                        metamodel: mm.name.clone(),
                        ty: nt.name.clone(),
                    });
                }
                cur = mm.node_type(sup).ok_or_else(|| MetamodelError::UnknownSupertype {
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

    pub fn node_types(&self) -> &[NodeType] {
        &self.node_types
    }

    pub fn edge_types(&self) -> &[EdgeType] {
        &self.edge_types
    }

    pub fn node_type(&self, name: &str) -> Option<&NodeType> {
        self.node_index.get(name).map(|&i| &self.node_types[i])
    }

    pub fn edge_type(&self, name: &str) -> Option<&EdgeType> {
        self.edge_index.get(name).map(|&i| &self.edge_types[i])
    }

    /// Declaration index of an edge type; used to order children deterministically.
    pub fn edge_type_rank(&self, name: &str) -> usize {
        self.edge_index.get(name).copied().unwrap_or(usize::MAX)
    }

    /// `ty` equals `ancestor` or inherits from it.
    pub fn is_subtype(&self, ty: &str, ancestor: &str) -> bool {
        let mut cur = self.node_type(ty);
        while let Some(nt) = cur {
            if nt.name == ancestor {
                return true;
            }
            cur = nt.supertype.as_deref().and_then(|s| self.node_type(s));
        }
        false
    }

    /// Kind of `attr` on `ty`, looking through supertypes.
    pub fn attribute_kind(&self, ty: &str, attr: &str) -> Option<AttrKind> {
        let mut cur = self.node_type(ty);
        while let Some(nt) = cur {
            if let Some(kind) = nt.attributes.get(attr) {
                return Some(*kind);
            }
            cur = nt.supertype.as_deref().and_then(|s| self.node_type(s));
        }
        None
    }

    /// All attributes visible on `ty`, inherited ones included.
    pub fn attributes_of(&self, ty: &str) -> BTreeMap<String, AttrKind> {
        let mut out = BTreeMap::new();
        let mut cur = self.node_type(ty);
        while let Some(nt) = cur {
            for (k, v) in &nt.attributes {
                out.entry(k.clone()).or_insert(*v);
            }
            cur = nt.supertype.as_deref().and_then(|s| self.node_type(s));
        }
        out
    }
}
