use std::collections::BTreeSet;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::model::{RuleSet, TggRule, TggSchema};
use super::validate::validate_rule;
use crate::csp::ConstraintRegistry;
use crate::graph::json::MetamodelCatalog;
use crate::graph::{CorrMetamodel, Diagnostic, Metamodel};

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("rule set parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("unknown metamodel `{0}`")]
    UnknownMetamodel(String),
    #[error("schema is inconsistent:\n{}", fmt_diags(.0))]
    Schema(Vec<Diagnostic>),
    #[error("rule set is invalid:\n{}", fmt_diags(.0))]
    Invalid(Vec<Diagnostic>),
    #[error("no-axiom: rule set has no axiom rule")]
    NoAxiom,
    #[error("multiple-axioms: {}", .0.join(", "))]
    MultipleAxioms(Vec<String>),
}

fn fmt_diags(d: &[Diagnostic]) -> String {
    d.iter().map(|d| format!("  {d}")).collect::<Vec<_>>().join("\n")
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum MetamodelRef {
    Name(String),
    Inline(Metamodel),
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum CorrRef {
    Name(String),
    Inline(CorrMetamodel),
}

#[derive(Serialize, Deserialize)]
struct SchemaDoc {
    source: MetamodelRef,
    corr: CorrRef,
    target: MetamodelRef,
}

#[derive(Serialize, Deserialize)]
struct RuleSetDoc {
    schema: SchemaDoc,
    rules: Vec<TggRule>,
}

fn resolve(r: MetamodelRef, catalog: &MetamodelCatalog) -> Result<Arc<Metamodel>, LoadError> {
    match r {
        MetamodelRef::Name(n) => catalog.graph(&n).cloned().ok_or(LoadError::UnknownMetamodel(n)),
        MetamodelRef::Inline(mm) => Ok(Arc::new(mm)),
    }
}

/// Parse and validate a rule set document. All rule diagnostics are reported together.
pub fn load_ruleset(
    document: &str,
    catalog: &MetamodelCatalog,
    constraints: &ConstraintRegistry,
) -> Result<RuleSet, LoadError> {
    let doc: RuleSetDoc = serde_json::from_str(document).map_err(|e| LoadError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let source = resolve(doc.schema.source, catalog)?;
    let target = resolve(doc.schema.target, catalog)?;
    let corr = match doc.schema.corr {
        CorrRef::Name(n) => catalog.corr(&n).cloned().ok_or(LoadError::UnknownMetamodel(n))?,
        CorrRef::Inline(mm) => Arc::new(mm),
    };
    let schema_diags = corr.check_against(&source, &target);
    if !schema_diags.is_empty() {
        return Err(LoadError::Schema(schema_diags));
    }
    let schema = TggSchema { source, corr, target };
    build_ruleset(schema, doc.rules, constraints)
}

/// Validate rules against `schema` and assemble them into a rule set.
pub fn build_ruleset(
    schema: TggSchema,
    rules: Vec<TggRule>,
    constraints: &ConstraintRegistry,
) -> Result<RuleSet, LoadError> {
    let mut diags = Vec::new();
    let mut names = BTreeSet::new();
    for rule in &rules {
        if !names.insert(rule.name.as_str()) {
            diags.push(Diagnostic::new(format!("rule {}", rule.name), "duplicate-rule: name used twice"));
        }
        diags.extend(validate_rule(rule, &schema, constraints));
    }
    if !diags.is_empty() {
        return Err(LoadError::Invalid(diags));
    }
    let axioms: Vec<String> = rules.iter().filter(|r| r.is_axiom()).map(|r| r.name.clone()).collect();
    match axioms.len() {
        0 => Err(LoadError::NoAxiom),
        1 => Ok(RuleSet { schema, rules }),
        _ => Err(LoadError::MultipleAxioms(axioms)),
    }
}

/// Serialize with metamodels referenced by name.
pub fn serialize_ruleset(rs: &RuleSet) -> String {
    let doc = RuleSetDoc {
        schema: SchemaDoc {
            source: MetamodelRef::Name(rs.schema.source.name().to_string()),
            corr: CorrRef::Name(rs.schema.corr.name().to_string()),
            target: MetamodelRef::Name(rs.schema.target.name().to_string()),
        },
        rules: rs.rules.clone(),
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("rule set serializes");
    s.push('\n');
    s
}
