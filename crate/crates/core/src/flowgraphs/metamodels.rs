use std::sync::{Arc, OnceLock};

use crate::graph::json::MetamodelCatalog;
use crate::graph::{AttrKind, CorrMetamodel, CorrType, EdgeType, Metamodel, NodeType};

pub const AST_METAMODEL: &str = "MiniJavaAst";
pub const FLOW_METAMODEL: &str = "FlowGraph";
pub const CORR_METAMODEL: &str = "AstFlowCorr";

/// Statement node types of the AST, in grammar order.
pub const STATEMENT_TYPES: &[&str] = &["Decl", "Assign", "If", "While", "Return", "Break"];

/// Labelled tree: every node hangs off its parent through an ordered `child` edge.
pub fn ast_metamodel() -> Arc<Metamodel> {
    static MM: OnceLock<Arc<Metamodel>> = OnceLock::new();
    MM.get_or_init(|| {
        let s = AttrKind::String;
        let mut types = vec![
            NodeType::new("AstNode").abstract_type(),
            NodeType::new("Program").extends("AstNode"),
            NodeType::new("Method").extends("AstNode").attr("returnType", s),
            NodeType::new("Name").extends("AstNode").attr("value", s),
            NodeType::new("Block").extends("AstNode").attr("role", s),
            NodeType::new("Stmt")
                .extends("AstNode")
                .attr("index", AttrKind::Int)
                .abstract_type(),
        ];
        types.extend(STATEMENT_TYPES.iter().map(|t| NodeType::new(t).extends("Stmt")));
        types.extend(
            ["Ident", "BinOp", "Expr"]
                .iter()
                .map(|t| NodeType::new(t).extends("AstNode").attr("value", s)),
        );
        let edges = vec![EdgeType::new("child", "AstNode", "AstNode").ordered().containment()];
        Arc::new(Metamodel::new(AST_METAMODEL, types, edges).expect("AST metamodel is well-formed"))
    })
    .clone()
}

/// Flow nodes with explicit control-flow successors. `Seq` groups the statements
/// of one block; its `role` tells method body, loop body and the two branches apart.
pub fn flow_metamodel() -> Arc<Metamodel> {
    static MM: OnceLock<Arc<Metamodel>> = OnceLock::new();
    MM.get_or_init(|| {
        let mut types = vec![
            NodeType::new("FlowNode").attr("txt", AttrKind::String).abstract_type(),
            NodeType::new("Method").extends("FlowNode"),
            NodeType::new("CfNode").extends("FlowNode").abstract_type(),
        ];
        types.extend(
            ["Exit", "SimpleStmt", "If", "Loop", "Return", "Break"]
                .iter()
                .map(|t| NodeType::new(t).extends("CfNode")),
        );
        types.push(NodeType::new("Seq").attr("role", AttrKind::String));
        let edges = vec![
            EdgeType::new("exit", "Method", "Exit").containment(),
            EdgeType::new("seq", "FlowNode", "Seq").containment(),
            EdgeType::new("stmts", "Seq", "CfNode").ordered().containment(),
            EdgeType::new("cfNext", "CfNode", "CfNode"),
        ];
        Arc::new(Metamodel::new(FLOW_METAMODEL, types, edges).expect("flow metamodel is well-formed"))
    })
    .clone()
}

pub fn corr_metamodel() -> Arc<CorrMetamodel> {
    static MM: OnceLock<Arc<CorrMetamodel>> = OnceLock::new();
    MM.get_or_init(|| {
        let types = vec![
            CorrType::new("Trace", "AstNode", "FlowNode").abstract_type(),
            CorrType::new("AstToFlow", "AstNode", "FlowNode").extends("Trace"),
            CorrType::new("AstToExit", "Method", "Exit").extends("Trace"),
        ];
        Arc::new(CorrMetamodel::new(CORR_METAMODEL, types).expect("corr metamodel is well-formed"))
    })
    .clone()
}

pub fn catalog() -> MetamodelCatalog {
    let mut c = MetamodelCatalog::new();
    c.add_graph(ast_metamodel());
    c.add_graph(flow_metamodel());
    c.add_corr(corr_metamodel());
    c
}
