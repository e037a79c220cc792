//! Typed attributed graphs, metamodels and triple models.

pub mod canon;
mod graph;
mod ids;
pub mod json;
mod metamodel;
mod triple;
mod value;

pub use graph::{Diagnostic, Edge, Graph, GraphError, Node};
pub use ids::{CorrId, EdgeId, NodeId};
pub use metamodel::{EdgeType, Metamodel, MetamodelError, NodeType};
pub use triple::{CorrLink, CorrMetamodel, CorrType, TripleError, TripleModel};
pub use value::{AttrKind, Value};
