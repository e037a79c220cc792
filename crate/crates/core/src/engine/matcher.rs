use std::collections::BTreeMap;

use super::marks::Marks;
use super::operational::{BindingMode, CorrEnd, ElementRole, OperationalRule, SearchStep};
use super::registry::Registries;
use crate::csp::{solve_csp, Arg, Bindings};
use crate::graph::{CorrId, EdgeId, Graph, NodeId, TripleModel, Value};
use crate::rules::Domain;

/// An occurrence of an operational rule's non-created elements, with the
/// solved attribute variables.
#[derive(Debug, Clone, PartialEq)]
pub struct Match {
    pub rule: String,
    pub anchor: NodeId,
    pub nodes: BTreeMap<String, NodeId>,
    pub corrs: BTreeMap<String, CorrId>,
    pub edges: BTreeMap<String, EdgeId>,
    pub bindings: Bindings,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Bound {
    Node(NodeId),
    Corr(CorrId),
}

#[derive(Debug, Clone)]
struct State {
    elems: Vec<Option<Bound>>,
    edges: Vec<Option<EdgeId>>,
    vars: Bindings,
}

struct Search<'a> {
    op: &'a OperationalRule,
    triple: &'a TripleModel,
    marks: &'a Marks,
    registries: &'a Registries,
    limit: usize,
    out: Vec<Match>,
}

/// All matches, ordered by anchor node id.
pub fn find_matches(op: &OperationalRule, triple: &TripleModel, marks: &Marks, registries: &Registries) -> Vec<Match> {
    let domain = op.rule.elements[op.anchor].domain;
    let anchors: Vec<NodeId> = graph_of(triple, domain).nodes().map(|n| n.id).collect();
    anchors
        .into_iter()
        .flat_map(|a| find_matches_at(op, triple, marks, registries, a))
        .collect()
}

pub fn find_matches_at(
    op: &OperationalRule,
    triple: &TripleModel,
    marks: &Marks,
    registries: &Registries,
    anchor: NodeId,
) -> Vec<Match> {
    matches_at(op, triple, marks, registries, anchor, usize::MAX)
}

pub(crate) fn matches_at(
    op: &OperationalRule,
    triple: &TripleModel,
    marks: &Marks,
    registries: &Registries,
    anchor: NodeId,
    limit: usize,
) -> Vec<Match> {
    let mut s = Search {
        op,
        triple,
        marks,
        registries,
        limit,
        out: Vec::new(),
    };
    let state = State {
        elems: vec![None; op.rule.elements.len()],
        edges: vec![None; op.rule.edges.len()],
        vars: Bindings::new(),
    };
    if let Some(state) = s.place(&state, op.anchor, Bound::Node(anchor)) {
        s.close(1, state, op.anchor);
    }
    s.out
}

fn graph_of(triple: &TripleModel, domain: Domain) -> &Graph {
    match domain {
        Domain::Target => &triple.target,
        _ => &triple.source,
    }
}

impl Search<'_> {
    fn done(&self) -> bool {
        self.out.len() >= self.limit
    }

    fn mark_ok(&self, role: ElementRole, domain: Domain, marked: bool) -> bool {
        match role {
            ElementRole::Context => marked || !self.op.direction.is_input(domain),
            ElementRole::Translate => !marked,
            ElementRole::Create => false,
        }
    }

    fn node_of(&self, state: &State, elem: usize) -> Option<NodeId> {
        match state.elems[elem] {
            Some(Bound::Node(n)) => Some(n),
            _ => None,
        }
    }

    fn elem_index(&self, id: &str) -> usize {
        self.op.rule.element_index(id).expect("validated rule")
    }

    /// Bind `elem` to `value` if types, marks, injectivity and attributes allow it.
    fn place(&self, state: &State, elem: usize, value: Bound) -> Option<State> {
        let el = &self.op.rule.elements[elem];
        let role = self.op.element_roles[elem];
        // Context elements may share a node (a statement's parent can also be its
        // successor); translated elements are matched injectively.
        let taken = state.elems.iter().enumerate().any(|(i, b)| {
            *b == Some(value)
                && self.op.rule.elements[i].domain == el.domain
                && (role != ElementRole::Context || self.op.element_roles[i] != ElementRole::Context)
        });
        if taken {
            return None;
        }
        let mut next = state.clone();
        match value {
            Bound::Corr(c) => {
                let link = self.triple.corr(c)?;
                if el.domain != Domain::Corr
                    || !self.triple.corr_metamodel().is_subtype(&link.ty, &el.ty)
                    || !self.mark_ok(role, Domain::Corr, self.marks.corrs.contains(&c))
                {
                    return None;
                }
            }
            Bound::Node(n) => {
                if el.domain == Domain::Corr {
                    return None;
                }
                let g = graph_of(self.triple, el.domain);
                let node = g.node(n)?;
                if !g.metamodel().is_subtype(&node.ty, &el.ty)
                    || !self.mark_ok(role, el.domain, self.marks.node_marked(el.domain, n))
                {
                    return None;
                }
                for (attr, var) in el.attribute_vars() {
                    let Some(v) = node.attr(&attr) else { continue };
                    match next.vars.get(&var) {
                        Some(existing) if existing != v => return None,
                        Some(_) => {}
                        None => {
                            next.vars.insert(var, v.clone());
                        }
                    }
                }
            }
        }
        next.elems[elem] = Some(value);
        Some(next)
    }

    fn bind_edge(&self, state: &State, k: usize, id: EdgeId) -> Option<State> {
        let re = &self.op.rule.edges[k];
        let g = graph_of(self.triple, re.domain);
        let edge = g.edge(id)?;
        if edge.ty != re.ty
            || state
                .edges
                .iter()
                .enumerate()
                .any(|(j, b)| {
                    *b == Some(id)
                        && self.op.rule.edges[j].domain == re.domain
                        && (self.op.edge_roles[j] != ElementRole::Context || self.op.edge_roles[k] != ElementRole::Context)
                })
            || !self.mark_ok(self.op.edge_roles[k], re.domain, self.marks.edge_marked(re.domain, id))
        {
            return None;
        }
        let mut next = state.clone();
        match (&re.position, edge.position) {
            (None, _) => {}
            (Some(_), None) => return None,
            (Some(Arg::Lit(v)), Some(p)) => {
                if *v != Value::Int(p as i64) {
                    return None;
                }
            }
            (Some(Arg::Var(var)), Some(p)) => {
                let p = Value::Int(p as i64);
                match next.vars.get(var) {
                    Some(existing) if *existing != p => return None,
                    Some(_) => {}
                    None => {
                        next.vars.insert(var.clone(), p);
                    }
                }
            }
        }
        next.edges[k] = Some(id);
        Some(next)
    }

    /// Bind every rule edge whose endpoints are now placed, then verify corr
    /// endpoints and bindings touching `placed`, then continue with `step`.
    fn close(&mut self, step: usize, state: State, placed: usize) {
        if self.done() {
            return;
        }
        let open = (0..self.op.rule.edges.len()).find(|&k| {
            let e = &self.op.rule.edges[k];
            state.edges[k].is_none()
                && self.op.edge_roles[k] != ElementRole::Create
                && state.elems[self.elem_index(&e.source)].is_some()
                && state.elems[self.elem_index(&e.target)].is_some()
        });
        if let Some(k) = open {
            let e = &self.op.rule.edges[k];
            let (Some(src), Some(tgt)) = (
                self.node_of(&state, self.elem_index(&e.source)),
                self.node_of(&state, self.elem_index(&e.target)),
            ) else {
                return;
            };
            let g = graph_of(self.triple, e.domain);
            let candidates: Vec<EdgeId> = g
                .outgoing(src)
                .filter(|me| me.ty == e.ty && me.target == tgt)
                .map(|me| me.id)
                .collect();
            for id in candidates {
                if let Some(next) = self.bind_edge(&state, k, id) {
                    self.close(step, next, placed);
                }
            }
            return;
        }
        if !self.corrs_consistent(&state) || !self.bindings_hold(&state, placed) {
            return;
        }
        self.descend(step, state);
    }

    fn corrs_consistent(&self, state: &State) -> bool {
        self.op.rule.elements.iter().enumerate().all(|(i, el)| {
            let Some(Bound::Corr(c)) = state.elems[i] else { return true };
            let link = self.triple.corr(c).expect("placed corr exists");
            let end_ok = |end: &Option<String>, node: NodeId| {
                end.as_deref()
                    .and_then(|id| self.node_of(state, self.elem_index(id)))
                    .is_none_or(|n| n == node)
            };
            end_ok(&el.src, link.source) && end_ok(&el.tgt, link.target)
        })
    }

    fn bindings_hold(&self, state: &State, placed: usize) -> bool {
        self.op.rule.bindings.iter().enumerate().all(|(b, be)| {
            if self.op.binding_modes[b] == BindingMode::Skip {
                return true;
            }
            let (from, to) = (self.elem_index(&be.from), self.elem_index(&be.to));
            if placed != from && placed != to {
                return true;
            }
            match (self.node_of(state, from), self.node_of(state, to)) {
                (Some(f), Some(t)) => self.resolve(b, f) == Some(t),
                _ => true,
            }
        })
    }

    fn resolve(&self, binding: usize, from: NodeId) -> Option<NodeId> {
        let name = &self.op.rule.bindings[binding].resolver;
        let resolver = self.registries.resolver(name).expect("checked when operationalized");
        resolver(self.triple, from)
    }

    fn descend(&mut self, step: usize, state: State) {
        if self.done() {
            return;
        }
        let Some(search) = self.op.search.get(step).cloned() else {
            self.finish(state);
            return;
        };
        let elem = search.elem();
        let el = &self.op.rule.elements[elem];
        let mut candidates: Vec<(Bound, Option<(usize, EdgeId)>)> = Vec::new();
        match search {
            SearchStep::Anchor { .. } => unreachable!("anchor is placed first"),
            SearchStep::Scan { .. } => {
                if el.domain == Domain::Corr {
                    candidates.extend(self.triple.corrs().map(|c| (Bound::Corr(c.id), None)));
                } else {
                    let g = graph_of(self.triple, el.domain);
                    candidates.extend(g.nodes().map(|n| (Bound::Node(n.id), None)));
                }
            }
            SearchStep::Resolve { binding, .. } => {
                let from = self.elem_index(&self.op.rule.bindings[binding].from);
                let from = self.node_of(&state, from).expect("placed before");
                if let Some(n) = self.resolve(binding, from) {
                    candidates.push((Bound::Node(n), None));
                }
            }
            SearchStep::Edge { edge, outgoing, .. } => {
                let re = &self.op.rule.edges[edge];
                let other = if outgoing { &re.source } else { &re.target };
                let other = self.node_of(&state, self.elem_index(other)).expect("placed before");
                let g = graph_of(self.triple, re.domain);
                if outgoing {
                    candidates.extend(
                        g.outgoing(other)
                            .filter(|e| e.ty == re.ty)
                            .map(|e| (Bound::Node(e.target), Some((edge, e.id)))),
                    );
                } else {
                    candidates.extend(
                        g.incoming(other)
                            .filter(|e| e.ty == re.ty)
                            .map(|e| (Bound::Node(e.source), Some((edge, e.id)))),
                    );
                }
            }
            SearchStep::CorrAt { node, end, .. } => {
                let n = self.node_of(&state, node).expect("placed before");
                let links = match end {
                    CorrEnd::Source => self.triple.corrs_from_source(n),
                    CorrEnd::Target => self.triple.corrs_from_target(n),
                };
                candidates.extend(links.into_iter().map(|c| (Bound::Corr(c.id), None)));
            }
            SearchStep::CorrEndpoint { corr, end, .. } => {
                let Some(Bound::Corr(c)) = state.elems[corr] else { unreachable!("placed before") };
                let link = self.triple.corr(c).expect("placed corr exists");
                let n = match end {
                    CorrEnd::Source => link.source,
                    CorrEnd::Target => link.target,
                };
                candidates.push((Bound::Node(n), None));
            }
        }
        for (value, via) in candidates {
            let Some(mut next) = self.place(&state, elem, value) else { continue };
            if let Some((k, id)) = via {
                match self.bind_edge(&next, k, id) {
                    Some(s) => next = s,
                    None => continue,
                }
            }
            self.close(step + 1, next, elem);
            if self.done() {
                return;
            }
        }
    }

    fn finish(&mut self, state: State) {
        let Ok(solution) = solve_csp(&self.op.plan, &state.vars) else { return };
        let rule = &self.op.rule;
        let mut m = Match {
            rule: rule.name.clone(),
            anchor: self.node_of(&state, self.op.anchor).expect("anchor placed"),
            nodes: BTreeMap::new(),
            corrs: BTreeMap::new(),
            edges: BTreeMap::new(),
            bindings: solution.bindings,
        };
        for (el, b) in rule.elements.iter().zip(&state.elems) {
            match b {
                Some(Bound::Node(n)) => {
                    m.nodes.insert(el.id.clone(), *n);
                }
                Some(Bound::Corr(c)) => {
                    m.corrs.insert(el.id.clone(), *c);
                }
                None => {}
            }
        }
        for (e, id) in rule.edges.iter().zip(&state.edges) {
            if let Some(id) = id {
                m.edges.insert(e.id.clone(), *id);
            }
        }
        self.out.push(m);
    }
}
