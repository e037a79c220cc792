use std::collections::{BTreeSet, HashMap};

use super::model::{Domain, Modifier, TggRule, TggSchema};
use crate::csp::{Arg, ConstraintRegistry};
use crate::graph::{Diagnostic, Metamodel};

fn related(mm: &Metamodel, a: &str, b: &str) -> bool {
    mm.is_subtype(a, b) || mm.is_subtype(b, a)
}

/// Well-formedness of one rule against `schema` and the constraint registry.
/// Each diagnostic message starts with a short kebab-case code.
pub fn validate_rule(rule: &TggRule, schema: &TggSchema, constraints: &ConstraintRegistry) -> Vec<Diagnostic> {
    let mut diags = Vec::new();
    let mut push = |loc: String, msg: String| diags.push(Diagnostic::new(format!("rule {}: {loc}", rule.name), msg));

    let mut ids: HashMap<&str, usize> = HashMap::new();
    for (i, el) in rule.elements.iter().enumerate() {
        if ids.insert(el.id.as_str(), i).is_some() {
            push(format!("element {}", el.id), "duplicate-element: id used twice".into());
        }
    }
    let mut housed: BTreeSet<String> = BTreeSet::new();

    for el in &rule.elements {
        let loc = format!("element {}", el.id);
        match el.domain {
            Domain::Corr => {
                let Some(ct) = schema.corr.corr_type(&el.ty) else {
                    push(loc, format!("unknown-type: corr type `{}` not declared", el.ty));
                    continue;
                };
                if el.modifier == Modifier::Create && ct.is_abstract {
                    push(loc.clone(), format!("abstract-create: corr type `{}` is abstract", el.ty));
                }
                if !el.assign.is_empty() || !el.vars.is_empty() {
                    push(loc.clone(), "corr-attribute: correspondence elements carry no attributes".into());
                }
                for (end, endpoint, domain, expected) in [
                    ("src", &el.src, Domain::Source, &ct.source),
                    ("tgt", &el.tgt, Domain::Target, &ct.target),
                ] {
                    let Some(endpoint) = endpoint else {
                        push(loc.clone(), format!("corr-endpoint: missing `{end}`"));
                        continue;
                    };
                    match rule.element(endpoint) {
                        None => push(loc.clone(), format!("corr-endpoint: `{end}` references unknown element `{endpoint}`")),
                        Some(other) if other.domain != domain => push(
                            loc.clone(),
                            format!("corr-endpoint: `{end}` element `{endpoint}` is not in the {domain} domain"),
                        ),
                        Some(other) => {
                            let mm = schema.metamodel(domain).expect("graph domain");
                            if !related(mm, &other.ty, expected) {
                                push(
                                    loc.clone(),
                                    format!("corr-endpoint: `{end}` element `{endpoint}` has type `{}`, corr type expects `{expected}`", other.ty),
                                );
                            }
                        }
                    }
                }
            }
            domain => {
                if el.src.is_some() || el.tgt.is_some() {
                    push(loc.clone(), "corr-endpoint: only correspondence elements take src/tgt".into());
                }
                let mm = schema.metamodel(domain).expect("graph domain");
                let Some(nt) = mm.node_type(&el.ty) else {
                    push(loc, format!("unknown-type: node type `{}` not declared in `{}`", el.ty, mm.name()));
                    continue;
                };
                if el.modifier == Modifier::Create && nt.is_abstract {
                    push(loc.clone(), format!("abstract-create: node type `{}` is abstract", el.ty));
                }
                for (attr, value) in &el.assign {
                    match mm.attribute_kind(&el.ty, attr) {
                        None => push(loc.clone(), format!("undeclared-attribute: `{attr}` on `{}`", el.ty)),
                        Some(kind) if kind != value.kind() => push(
                            loc.clone(),
                            format!("kind-mismatch: `{attr}` expects {kind}, assigned {}", value.kind()),
                        ),
                        Some(_) => {}
                    }
                    if el.vars.contains_key(attr) {
                        push(loc.clone(), format!("assigned-and-bound: `{attr}` is both assigned and variable-bound"));
                    }
                }
                for (attr, var) in &el.vars {
                    if mm.attribute_kind(&el.ty, attr).is_none() {
                        push(loc.clone(), format!("undeclared-attribute: `{attr}` on `{}`", el.ty));
                    }
                    housed.insert(var.0.clone());
                }
                for (attr, var) in el.attribute_vars() {
                    if el.assign.contains_key(&attr) {
                        housed.insert(var);
                    }
                }
            }
        }
    }

    let created_elements = rule.elements.iter().any(|e| e.modifier == Modifier::Create);
    let mut edge_ids = BTreeSet::new();
    for edge in &rule.edges {
        let loc = format!("edge {}", edge.id);
        if !edge_ids.insert(edge.id.as_str()) {
            push(loc.clone(), "duplicate-edge: id used twice".into());
        }
        let Some(mm) = schema.metamodel(edge.domain) else {
            push(loc, "edge-domain: edges belong to the source or target domain".into());
            continue;
        };
        let Some(et) = mm.edge_type(&edge.ty) else {
            push(loc, format!("unknown-type: edge type `{}` not declared in `{}`", edge.ty, mm.name()));
            continue;
        };
        let mut ends = Vec::new();
        for (end, id, expected) in [("source", &edge.source, &et.source), ("target", &edge.target, &et.target)] {
            match rule.element(id) {
                None => push(loc.clone(), format!("dangling-rule-edge: {end} references unknown element `{id}`")),
                Some(el) if el.domain != edge.domain => {
                    push(loc.clone(), format!("edge-domain: {end} `{id}` lies in the {} domain", el.domain))
                }
                Some(el) => {
                    if !related(mm, &el.ty, expected) {
                        push(loc.clone(), format!("edge-endpoint: {end} `{id}` has type `{}`, edge expects `{expected}`", el.ty));
                    }
                    ends.push(el.modifier);
                }
            }
        }
        if edge.modifier == Modifier::Context && ends.contains(&Modifier::Create) {
            push(loc.clone(), "context-edge-on-created: context edge touches a created element".into());
        }
        if edge.modifier == Modifier::Create
            && ends.len() == 2
            && ends.iter().all(|m| *m == Modifier::Context)
            && created_elements
        {
            push(loc.clone(), "created-edge-between-context: created edge joins two context elements".into());
        }
        match (&edge.position, et.ordered) {
            (Some(_), false) => push(loc.clone(), format!("position-unordered: `{}` is unordered", edge.ty)),
            (None, true) if edge.modifier == Modifier::Create => {
                push(loc.clone(), format!("position-missing: created `{}` edge needs a position", edge.ty))
            }
            (Some(Arg::Var(v)), true) => {
                housed.insert(v.clone());
            }
            (Some(Arg::Lit(value)), true) if value.as_int().is_none_or(|p| p < 0) => {
                push(loc.clone(), format!("position-literal: `{value}` is not a non-negative int"))
            }
            _ => {}
        }
    }

    for b in &rule.bindings {
        let loc = format!("binding {}->{}", b.from, b.to);
        let from = rule.element(&b.from);
        let to = rule.element(&b.to);
        if from.is_none() {
            push(loc.clone(), format!("binding-endpoint: unknown element `{}`", b.from));
        }
        if to.is_none() {
            push(loc.clone(), format!("binding-endpoint: unknown element `{}`", b.to));
        }
        if let (Some(from), Some(to)) = (from, to) {
            if to.modifier != Modifier::Context {
                push(loc.clone(), "binding-created-target: binding must lead to a context element".into());
            }
            if from.domain != to.domain || from.domain == Domain::Corr {
                push(loc.clone(), "binding-domain: endpoints must share the source or target domain".into());
            }
        }
    }

    let temps: BTreeSet<String> = rule.temps.iter().map(|t| t.0.clone()).collect();
    for t in &temps {
        if housed.contains(t) {
            push(format!("temp {t}"), "temp-housed: temp variable is also element-housed".into());
        }
    }
    let mut used = BTreeSet::new();
    for inst in &rule.csp {
        let loc = format!("constraint {inst}");
        match constraints.get(&inst.constraint) {
            None => push(loc.clone(), format!("unknown-constraint: `{}` not registered", inst.constraint)),
            Some(def) if def.arity() != inst.args.len() => push(
                loc.clone(),
                format!("arity-mismatch: `{}` takes {} arguments", inst.constraint, def.arity()),
            ),
            Some(_) => {}
        }
        for v in inst.variables() {
            used.insert(v.to_string());
            if !housed.contains(v) && !temps.contains(v) {
                push(loc.clone(), format!("unhoused-variable: `${v}` is neither element-housed nor a temp"));
            }
        }
    }
    for t in temps.difference(&used) {
        push(format!("temp {t}"), "unused-temp: temp variable not used by the CSP".into());
    }
    diags
}
