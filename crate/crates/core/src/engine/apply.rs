use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use super::marks::Marks;
use super::matcher::Match;
use super::operational::{ElementRole, OperationalRule};
use super::registry::Registries;
use super::Direction;
use crate::csp::{solve_csp, Arg, CspFailure};
use crate::graph::{CorrId, EdgeId, GraphError, NodeId, TripleError, TripleModel, Value};
use crate::rules::Domain;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ApplyError {
    #[error("stale match: {0}")]
    Stale(String),
    #[error(transparent)]
    Csp(#[from] CspFailure),
    #[error("variable `{var}` for `{element}` is unbound after solving")]
    Unbound { element: String, var: String },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Triple(#[from] TripleError),
    #[error("post-processor `{name}` failed: {message}")]
    Post { name: String, message: String },
}

/// One rule application, as written to the trace log.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApplicationRecord {
    pub rule: String,
    pub direction: Direction,
    pub anchor: NodeId,
    pub created_nodes: Vec<(Domain, NodeId)>,
    pub created_edges: Vec<(Domain, EdgeId)>,
    pub created_corrs: Vec<CorrId>,
}

fn domain_tag(d: Domain) -> &'static str {
    match d {
        Domain::Source => "s",
        Domain::Corr => "c",
        Domain::Target => "t",
    }
}

impl fmt::Display for ApplicationRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let anchor_domain = self.direction.anchor_domain();
        write!(
            f,
            "{} {} anchor={}:{} created=[",
            self.direction,
            self.rule,
            domain_tag(anchor_domain),
            self.anchor
        )?;
        let items = self
            .created_nodes
            .iter()
            .map(|(d, n)| format!("{}:{n}", domain_tag(*d)))
            .chain(self.created_edges.iter().map(|(d, e)| format!("{}:{e}", domain_tag(*d))))
            .chain(self.created_corrs.iter().map(|c| format!("c:{c}")));
        for (i, s) in items.enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            f.write_str(&s)?;
        }
        f.write_str("]")
    }
}

/// What a post-processor sees: the whole triple, the nodes of the match, and
/// write access to the attributes of nodes this application produced.
///
/// When checking, nothing is produced; writes to translated nodes become
/// comparisons and a differing value fails the application.
pub struct PostContext<'a> {
    triple: &'a mut TripleModel,
    nodes: &'a BTreeMap<String, (Domain, NodeId)>,
    writable: BTreeSet<(Domain, NodeId)>,
    compare_only: bool,
}

impl PostContext<'_> {
    pub fn triple(&self) -> &TripleModel {
        self.triple
    }

    /// Node bound to rule element `element`, with its domain.
    pub fn node(&self, element: &str) -> Option<(Domain, NodeId)> {
        self.nodes.get(element).copied()
    }

    /// Nodes of `domain` this application may write, in id order.
    pub fn writable_nodes(&self, domain: Domain) -> Vec<NodeId> {
        self.writable.iter().filter(|(d, _)| *d == domain).map(|&(_, n)| n).collect()
    }

    pub fn is_writable(&self, domain: Domain, node: NodeId) -> bool {
        self.writable.contains(&(domain, node))
    }

    pub fn set_attr(&mut self, domain: Domain, node: NodeId, attr: &str, value: Value) -> Result<(), String> {
        if !self.is_writable(domain, node) {
            return Err(format!("{node} was not produced by this application"));
        }
        let g = match domain {
            Domain::Source => &mut self.triple.source,
            Domain::Target => &mut self.triple.target,
            Domain::Corr => return Err("corr links have no attributes".into()),
        };
        if self.compare_only {
            let current = g.node(node).and_then(|n| n.attr(attr));
            return match current {
                Some(v) if *v == value => Ok(()),
                Some(v) => Err(format!("{node}.{attr} is {v}, expected {value}")),
                None => Err(format!("{node}.{attr} is unset, expected {value}")),
            };
        }
        g.set_attr(node, attr, value).map_err(|e| e.to_string())
    }
}

fn check_fresh(op: &OperationalRule, m: &Match, triple: &TripleModel, marks: &Marks) -> Result<(), ApplyError> {
    let input = |d: Domain| op.direction.is_input(d);
    for (el, role) in op.rule.elements.iter().zip(&op.element_roles) {
        let marked = match (el.domain, m.nodes.get(&el.id), m.corrs.get(&el.id)) {
            (_, None, None) if *role == ElementRole::Create => continue,
            (Domain::Corr, _, Some(c)) if triple.corr(*c).is_some() => marks.corrs.contains(c),
            (Domain::Source, Some(n), _) if triple.source.node(*n).is_some() => marks.node_marked(el.domain, *n),
            (Domain::Target, Some(n), _) if triple.target.node(*n).is_some() => marks.node_marked(el.domain, *n),
            _ => return Err(ApplyError::Stale(format!("element `{}` no longer bound", el.id))),
        };
        let ok = match role {
            ElementRole::Translate => !marked,
            ElementRole::Context => marked || !input(el.domain),
            ElementRole::Create => true,
        };
        if !ok {
            return Err(ApplyError::Stale(format!("element `{}` changed mark state", el.id)));
        }
    }
    for (e, role) in op.rule.edges.iter().zip(&op.edge_roles) {
        if *role == ElementRole::Translate && m.edges.get(&e.id).is_none_or(|id| marks.edge_marked(e.domain, *id)) {
            return Err(ApplyError::Stale(format!("edge `{}` already translated", e.id)));
        }
    }
    Ok(())
}

/// Apply `m`: create output elements and corr links, mark the translated
/// elements, then run the post-processor. On error nothing is changed.
pub fn apply_rule(
    op: &OperationalRule,
    m: &Match,
    triple: &mut TripleModel,
    marks: &mut Marks,
    registries: &Registries,
) -> Result<ApplicationRecord, ApplyError> {
    check_fresh(op, m, triple, marks)?;
    let bindings = solve_csp(&op.plan, &m.bindings)?.bindings;
    let rule = &op.rule;

    let mut work = triple.clone();
    let mut new_marks = marks.clone();
    let mut record = ApplicationRecord {
        rule: rule.name.clone(),
        direction: op.direction,
        anchor: m.anchor,
        created_nodes: Vec::new(),
        created_edges: Vec::new(),
        created_corrs: Vec::new(),
    };
    let mut nodes: BTreeMap<String, (Domain, NodeId)> = rule
        .elements
        .iter()
        .filter_map(|el| m.nodes.get(&el.id).map(|n| (el.id.clone(), (el.domain, *n))))
        .collect();

    for (el, role) in rule.elements.iter().zip(&op.element_roles) {
        if *role != ElementRole::Create || el.domain == Domain::Corr {
            continue;
        }
        let mut attrs = Vec::new();
        for (attr, var) in el.attribute_vars() {
            let value = bindings.get(&var).cloned().ok_or_else(|| ApplyError::Unbound {
                element: el.id.clone(),
                var: var.clone(),
            })?;
            attrs.push((attr, value));
        }
        let g = if el.domain == Domain::Source { &mut work.source } else { &mut work.target };
        let id = g.add_node(&el.ty, attrs)?;
        nodes.insert(el.id.clone(), (el.domain, id));
        record.created_nodes.push((el.domain, id));
    }
    let node_of = |id: &str| nodes.get(id).map(|&(_, n)| n).expect("validated rule endpoints");

    for (e, role) in rule.edges.iter().zip(&op.edge_roles) {
        if *role != ElementRole::Create {
            continue;
        }
        let position = match &e.position {
            None => None,
            Some(Arg::Lit(v)) => Some(v.clone()),
            Some(Arg::Var(var)) => Some(bindings.get(var).cloned().ok_or_else(|| ApplyError::Unbound {
                element: e.id.clone(),
                var: var.clone(),
            })?),
        };
        let position = match position {
            None => None,
            Some(Value::Int(p)) if p >= 0 => Some(p as u32),
            Some(v) => return Err(ApplyError::Stale(format!("edge `{}` position {v} is not an ordinal", e.id))),
        };
        let g = if e.domain == Domain::Source { &mut work.source } else { &mut work.target };
        let id = g.add_edge_unordered_fill(&e.ty, node_of(&e.source), node_of(&e.target), position)?;
        record.created_edges.push((e.domain, id));
    }

    for (el, role) in rule.elements.iter().zip(&op.element_roles) {
        if *role != ElementRole::Create || el.domain != Domain::Corr {
            continue;
        }
        let (Some(src), Some(tgt)) = (&el.src, &el.tgt) else {
            return Err(ApplyError::Stale(format!("corr `{}` lacks endpoints", el.id)));
        };
        let id = work.add_corr(&el.ty, node_of(src), node_of(tgt))?;
        record.created_corrs.push(id);
    }

    let mut writable: BTreeSet<(Domain, NodeId)> = record.created_nodes.iter().copied().collect();
    for (el, role) in rule.elements.iter().zip(&op.element_roles) {
        if *role != ElementRole::Translate {
            continue;
        }
        if let Some(c) = m.corrs.get(&el.id) {
            new_marks.mark_corr(*c);
        } else if let Some(n) = m.nodes.get(&el.id) {
            new_marks.mark_node(el.domain, *n);
            if op.direction == Direction::Check {
                writable.insert((el.domain, *n));
            }
        }
    }
    for (e, role) in rule.edges.iter().zip(&op.edge_roles) {
        if *role == ElementRole::Translate {
            new_marks.mark_edge(e.domain, m.edges[&e.id]);
        }
    }

    if let Some(name) = &rule.post {
        let hook = registries.post_processor(name).expect("checked when operationalized").clone();
        let mut ctx = PostContext {
            triple: &mut work,
            nodes: &nodes,
            writable,
            compare_only: op.direction == Direction::Check,
        };
        hook(&mut ctx, op.direction).map_err(|message| ApplyError::Post {
            name: name.clone(),
            message,
        })?;
    }

    *triple = work;
    *marks = new_marks;
    Ok(record)
}
