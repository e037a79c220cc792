//! The mini-Java ↔ flowgraph case: metamodels, rules, user constraints and hooks.

pub mod cfg;
pub mod constraints;
mod index;
pub mod metamodels;
pub mod resolvers;

use crate::csp::ConstraintRegistry;
use crate::engine::Registries;
use crate::graph::json::MetamodelCatalog;
use crate::rules::{load_ruleset, LoadError, RuleSet};

pub use cfg::{control_flow_edges, statement_order};
pub use index::set_index;
pub use metamodels::{ast_metamodel, catalog, corr_metamodel, flow_metamodel};

/// The rule set shipped with the crate.
pub const RULES_JSON: &str = include_str!("../../assets/flowgraphs.rules.json");

/// Library constraints plus `isAtom` / `addPrefix`, the three resolvers and `setIndex`.
pub fn registries() -> Registries {
    let mut constraints = ConstraintRegistry::with_builtins();
    constraints::register(&mut constraints).expect("fresh registry");
    let mut reg = Registries::new(constraints);
    reg.register_resolver("findNextFlowNode", |t, n| resolvers::next_flow_node(&t.source, n))
        .expect("fresh registry");
    reg.register_resolver("findMethodNode", |t, n| resolvers::enclosing_method(&t.source, n))
        .expect("fresh registry");
    reg.register_resolver("findBreakTarget", |t, n| resolvers::break_target(&t.source, n))
        .expect("fresh registry");
    reg.register_post_processor("setIndex", set_index).expect("fresh registry");
    reg
}

/// Load a rule set document against the flowgraph metamodels.
pub fn load_rules(document: &str, registries: &Registries) -> Result<RuleSet, LoadError> {
    let catalog: MetamodelCatalog = catalog();
    load_ruleset(document, &catalog, &registries.constraints)
}

pub fn build_flowgraphs_ruleset() -> (RuleSet, Registries) {
    let reg = registries();
    let rules = load_rules(RULES_JSON, &reg).expect("embedded rule set is valid");
    (rules, reg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{backward_transform, check_consistency, forward_transform};
    use crate::graph::canon::canonical_graph;
    use crate::minijava::{parse_program, unparse_program};

    const SAMPLE: &str = "void m() {\n    int x = 1;\n    while (x < 10) {\n        if (x == 5) {\n            break;\n        } else {\n            x = x + 1;\n        }\n    }\n    a = b + 3;\n    return;\n}\n";

    #[test]
    fn rule_set_loads() {
        let (rules, _) = build_flowgraphs_ruleset();
        let names: Vec<&str> = rules.rules.iter().map(|r| r.name.as_str()).collect();
        assert_eq!(names.len(), 8);
        assert_eq!(rules.axiom().name, "MethodRule");
    }

    #[test]
    fn sample_round_trip() {
        let (rules, reg) = build_flowgraphs_ruleset();
        let ast = parse_program(SAMPLE).unwrap();
        let fwd = forward_transform(ast.clone(), &rules, &reg).unwrap_or_else(|e| panic!("{e}"));
        assert!(fwd.triple.conforms().is_empty(), "{:?}", fwd.triple.conforms());
        let report = check_consistency(&fwd.triple, &rules, &reg).unwrap();
        assert!(report.consistent, "{:?}", report.unmarked());
        let back = backward_transform(fwd.triple.target.clone(), &rules, &reg).unwrap_or_else(|e| panic!("{e}"));
        assert_eq!(unparse_program(&back.triple.source).unwrap(), SAMPLE);
        assert_eq!(canonical_graph(&back.triple.source), canonical_graph(&ast));
    }
}
