use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::csp::{Arg, ConstraintInstance};
use crate::graph::{CorrMetamodel, Metamodel, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Domain {
    Source,
    Corr,
    Target,
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Domain::Source => "source",
            Domain::Corr => "corr",
            Domain::Target => "target",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Modifier {
    Context,
    Create,
}

/// A rule variable name, written `$name` in rule documents.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var(pub String);

impl Serialize for Var {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(&format_args!("${}", self.0))
    }
}

impl<'de> Deserialize<'de> for Var {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        match s.strip_prefix('$') {
            Some(v) if !v.is_empty() => Ok(Var(v.to_string())),
            _ => Err(serde::de::Error::custom(format!("variable `{s}` must start with `$`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleElement {
    pub id: String,
    pub domain: Domain,
    #[serde(rename = "type")]
    pub ty: String,
    pub modifier: Modifier,
    /// Attribute assignments to literals.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub assign: BTreeMap<String, Value>,
    /// Attributes bound to CSP variables.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub vars: BTreeMap<String, Var>,
    /// Source-domain endpoint, correspondence elements only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub src: Option<String>,
    /// Target-domain endpoint, correspondence elements only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tgt: Option<String>,
}

impl RuleElement {
    /// Every `(attribute, variable)` pair of this element, including the implicit
    /// `element.attr` variables that carry literal assignments.
    pub fn attribute_vars(&self) -> Vec<(String, String)> {
        let mut out: Vec<(String, String)> = self
            .vars
            .iter()
            .map(|(a, v)| (a.clone(), v.0.clone()))
            .collect();
        out.extend(
            self.assign
                .keys()
                .map(|a| (a.clone(), assignment_var(&self.id, a))),
        );
        out
    }
}

/// Name of the implicit variable holding an assigned attribute.
pub fn assignment_var(element: &str, attr: &str) -> String {
    format!("{element}.{attr}")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleEdge {
    pub id: String,
    pub domain: Domain,
    #[serde(rename = "type")]
    pub ty: String,
    pub source: String,
    pub target: String,
    pub modifier: Modifier,
    /// Ordinal of the edge: a variable or a literal position.
    #[serde(default, rename = "pos", skip_serializing_if = "Option::is_none")]
    pub position: Option<Arg>,
}

/// A virtual link: `to` is computed from `from` by a registered resolver.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BindingExpr {
    pub from: String,
    pub to: String,
    pub resolver: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TggRule {
    pub name: String,
    pub elements: Vec<RuleElement>,
    #[serde(default)]
    pub edges: Vec<RuleEdge>,
    #[serde(default)]
    pub csp: Vec<ConstraintInstance>,
    /// Rule-local CSP variables not housed by any element.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub temps: Vec<Var>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub bindings: Vec<BindingExpr>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub post: Option<String>,
}

impl TggRule {
    /// An axiom creates every element and edge it mentions.
    pub fn is_axiom(&self) -> bool {
        self.elements.iter().all(|e| e.modifier == Modifier::Create)
            && self.edges.iter().all(|e| e.modifier == Modifier::Create)
    }

    pub fn element(&self, id: &str) -> Option<&RuleElement> {
        self.elements.iter().find(|e| e.id == id)
    }

    pub fn element_index(&self, id: &str) -> Option<usize> {
        self.elements.iter().position(|e| e.id == id)
    }

    /// The declared CSP followed by one `eq` per literal attribute assignment.
    pub fn compiled_csp(&self) -> Vec<ConstraintInstance> {
        let mut out = self.csp.clone();
        for el in &self.elements {
            for (attr, value) in &el.assign {
                out.push(ConstraintInstance::new(
                    "eq",
                    vec![Arg::var(&assignment_var(&el.id, attr)), Arg::Lit(value.clone())],
                ));
            }
        }
        out
    }
}

/// Source, correspondence and target metamodels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TggSchema {
    pub source: Arc<Metamodel>,
    pub corr: Arc<CorrMetamodel>,
    pub target: Arc<Metamodel>,
}

impl TggSchema {
    pub fn metamodel(&self, domain: Domain) -> Option<&Arc<Metamodel>> {
        match domain {
            Domain::Source => Some(&self.source),
            Domain::Target => Some(&self.target),
            Domain::Corr => None,
        }
    }
}

/// A validated rule set with exactly one axiom.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleSet {
    pub schema: TggSchema,
    pub rules: Vec<TggRule>,
}

impl RuleSet {
    pub fn axiom(&self) -> &TggRule {
        self.rules
            .iter()
            .find(|r| r.is_axiom())
            .expect("validated rule sets have an axiom")
    }

    pub fn rule(&self, name: &str) -> Option<&TggRule> {
        self.rules.iter().find(|r| r.name == name)
    }
}
