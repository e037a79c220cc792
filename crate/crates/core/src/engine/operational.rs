use std::collections::BTreeSet;

use thiserror::Error;

use super::registry::Registries;
use super::Direction;
use crate::csp::{sort_csp, CspPlan, SortError};
use crate::rules::{Domain, Modifier, TggRule};

/// How a rule element is treated in one direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ElementRole {
    /// Must exist; if it lies in an input domain it must already be marked.
    Context,
    /// Created by the rule but lies in an input domain: must exist unmarked, gets marked.
    Translate,
    /// Created by the application.
    Create,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BindingMode {
    /// Resolver output proposes the `to` element during matching.
    Generate,
    /// Resolver output must equal the structurally matched `to` element.
    Assert,
    Skip,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorrEnd {
    Source,
    Target,
}

/// How the matcher obtains candidates for one element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchStep {
    Anchor { elem: usize },
    Scan { elem: usize },
    Resolve { elem: usize, binding: usize },
    /// Follow rule edge `edge` from its already placed other endpoint.
    Edge { elem: usize, edge: usize, outgoing: bool },
    /// Corr links touching the placed node element `node`.
    CorrAt { elem: usize, node: usize, end: CorrEnd },
    /// Endpoint of the placed corr element `corr`.
    CorrEndpoint { elem: usize, corr: usize, end: CorrEnd },
}

impl SearchStep {
    pub(crate) fn elem(&self) -> usize {
        match *self {
            SearchStep::Anchor { elem }
            | SearchStep::Scan { elem }
            | SearchStep::Resolve { elem, .. }
            | SearchStep::Edge { elem, .. }
            | SearchStep::CorrAt { elem, .. }
            | SearchStep::CorrEndpoint { elem, .. } => elem,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OperationalError {
    #[error("rule `{rule}` creates nothing in the {domain} domain to anchor a {direction} match")]
    NoAnchor {
        rule: String,
        domain: Domain,
        direction: Direction,
    },
    #[error("rule `{rule}` has no {direction} constraint order: {source}")]
    Csp {
        rule: String,
        direction: Direction,
        #[source]
        source: SortError,
    },
    #[error("rule `{rule}` uses unregistered resolver `{name}`")]
    UnknownResolver { rule: String, name: String },
    #[error("rule `{rule}` uses unregistered post-processor `{name}`")]
    UnknownPostProcessor { rule: String, name: String },
}

/// A rule compiled for one direction.
#[derive(Debug, Clone)]
pub struct OperationalRule {
    pub rule: TggRule,
    pub direction: Direction,
    pub element_roles: Vec<ElementRole>,
    pub edge_roles: Vec<ElementRole>,
    pub binding_modes: Vec<BindingMode>,
    pub plan: CspPlan,
    /// Index of the first input-domain element the rule creates.
    pub anchor: usize,
    pub search: Vec<SearchStep>,
}

impl OperationalRule {
    pub fn name(&self) -> &str {
        &self.rule.name
    }

    pub fn is_axiom(&self) -> bool {
        self.rule.is_axiom()
    }

    /// Variables the matcher binds from existing attributes and edge positions.
    pub fn matched_variables(&self) -> BTreeSet<String> {
        matched_variables(&self.rule, &self.element_roles, &self.edge_roles)
    }
}

fn role(direction: Direction, domain: Domain, modifier: Modifier) -> ElementRole {
    match (modifier, direction.is_input(domain)) {
        (Modifier::Context, _) => ElementRole::Context,
        (Modifier::Create, true) => ElementRole::Translate,
        (Modifier::Create, false) => ElementRole::Create,
    }
}

fn matched_variables(rule: &TggRule, element_roles: &[ElementRole], edge_roles: &[ElementRole]) -> BTreeSet<String> {
    let mut vars = BTreeSet::new();
    for (el, r) in rule.elements.iter().zip(element_roles) {
        if *r != ElementRole::Create {
            vars.extend(el.attribute_vars().into_iter().map(|(_, v)| v));
        }
    }
    for (e, r) in rule.edges.iter().zip(edge_roles) {
        if *r == ElementRole::Create {
            continue;
        }
        if let Some(v) = e.position.as_ref().and_then(|p| p.as_var()) {
            vars.insert(v.to_string());
        }
    }
    vars
}

pub fn operationalize(
    rule: &TggRule,
    direction: Direction,
    registries: &Registries,
) -> Result<OperationalRule, OperationalError> {
    let element_roles: Vec<ElementRole> = rule
        .elements
        .iter()
        .map(|e| role(direction, e.domain, e.modifier))
        .collect();
    let edge_roles: Vec<ElementRole> = rule
        .edges
        .iter()
        .map(|e| role(direction, e.domain, e.modifier))
        .collect();
    let anchor_domain = direction.anchor_domain();
    let anchor = rule
        .elements
        .iter()
        .zip(&element_roles)
        .position(|(e, r)| e.domain == anchor_domain && *r == ElementRole::Translate)
        .ok_or_else(|| OperationalError::NoAnchor {
            rule: rule.name.clone(),
            domain: anchor_domain,
            direction,
        })?;

    let mut binding_modes = Vec::with_capacity(rule.bindings.len());
    for b in &rule.bindings {
        if registries.resolver(&b.resolver).is_none() {
            return Err(OperationalError::UnknownResolver {
                rule: rule.name.clone(),
                name: b.resolver.clone(),
            });
        }
        let from_domain = rule.element(&b.from).map(|e| e.domain);
        binding_modes.push(match direction {
            Direction::Check => BindingMode::Assert,
            _ if from_domain.is_some_and(|d| direction.is_input(d)) => BindingMode::Generate,
            _ => BindingMode::Skip,
        });
    }
    if let Some(post) = &rule.post {
        if registries.post_processor(post).is_none() {
            return Err(OperationalError::UnknownPostProcessor {
                rule: rule.name.clone(),
                name: post.clone(),
            });
        }
    }

    let bound = matched_variables(rule, &element_roles, &edge_roles);
    let csp = rule.compiled_csp();
    let plan = sort_csp(&csp, &bound, &registries.constraints).map_err(|source| OperationalError::Csp {
        rule: rule.name.clone(),
        direction,
        source,
    })?;
    let search = search_order(rule, &element_roles, &binding_modes, anchor);
    Ok(OperationalRule {
        rule: rule.clone(),
        direction,
        element_roles,
        edge_roles,
        binding_modes,
        plan,
        anchor,
        search,
    })
}

/// Greedy connected order starting at the anchor. Resolver links are preferred,
/// then rule edges, then corr endpoints; disconnected elements fall back to a type scan.
fn search_order(rule: &TggRule, roles: &[ElementRole], modes: &[BindingMode], anchor: usize) -> Vec<SearchStep> {
    let idx = |id: &str| rule.element_index(id).expect("validated rule");
    let wanted: Vec<usize> = (0..rule.elements.len())
        .filter(|&i| roles[i] != ElementRole::Create)
        .collect();
    let mut placed = vec![false; rule.elements.len()];
    placed[anchor] = true;
    let mut steps = vec![SearchStep::Anchor { elem: anchor }];
    let edge_usable = |k: usize| {
        let e = &rule.edges[k];
        roles[idx(&e.source)] != ElementRole::Create && roles[idx(&e.target)] != ElementRole::Create
    };
    loop {
        let next: Vec<usize> = wanted.iter().copied().filter(|&i| !placed[i]).collect();
        if next.is_empty() {
            break;
        }
        let mut choice = None;
        for &i in &next {
            let el = &rule.elements[i];
            let via_binding = rule.bindings.iter().enumerate().find(|(b, be)| {
                modes[*b] == BindingMode::Generate && idx(&be.to) == i && placed[idx(&be.from)]
            });
            if let Some((b, _)) = via_binding {
                choice = Some(SearchStep::Resolve { elem: i, binding: b });
                break;
            }
            let via_edge = (0..rule.edges.len()).filter(|&k| edge_usable(k)).find_map(|k| {
                let e = &rule.edges[k];
                if idx(&e.target) == i && placed[idx(&e.source)] {
                    Some(SearchStep::Edge { elem: i, edge: k, outgoing: true })
                } else if idx(&e.source) == i && placed[idx(&e.target)] {
                    Some(SearchStep::Edge { elem: i, edge: k, outgoing: false })
                } else {
                    None
                }
            });
            if via_edge.is_some() {
                choice = via_edge;
                break;
            }
            if el.domain == Domain::Corr {
                let end_placed = |end: &Option<String>| end.as_deref().map(idx).filter(|&n| placed[n]);
                if let Some(n) = end_placed(&el.src) {
                    choice = Some(SearchStep::CorrAt { elem: i, node: n, end: CorrEnd::Source });
                    break;
                }
                if let Some(n) = end_placed(&el.tgt) {
                    choice = Some(SearchStep::CorrAt { elem: i, node: n, end: CorrEnd::Target });
                    break;
                }
            } else {
                let via_corr = rule.elements.iter().enumerate().find_map(|(c, ce)| {
                    if ce.domain != Domain::Corr || !placed[c] {
                        return None;
                    }
                    if ce.src.as_deref() == Some(el.id.as_str()) {
                        Some(SearchStep::CorrEndpoint { elem: i, corr: c, end: CorrEnd::Source })
                    } else if ce.tgt.as_deref() == Some(el.id.as_str()) {
                        Some(SearchStep::CorrEndpoint { elem: i, corr: c, end: CorrEnd::Target })
                    } else {
                        None
                    }
                });
                if via_corr.is_some() {
                    choice = via_corr;
                    break;
                }
            }
        }
        let step = choice.unwrap_or(SearchStep::Scan { elem: next[0] });
        placed[step.elem()] = true;
        steps.push(step);
    }
    steps
}
