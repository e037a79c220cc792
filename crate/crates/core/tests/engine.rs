mod common;

use common::rules;
use tggflow::engine::{
    backward_transform, check_consistency, find_matches, forward_transform, operationalize, Direction, Marks,
    RegistryError, TransformError,
};
use tggflow::flowgraphs::metamodels::{ast_metamodel, corr_metamodel, flow_metamodel};
use tggflow::graph::{Graph, TripleModel, Value};
use tggflow::minijava::parse_program;

fn pairs(sig: &[(&str, &str)]) -> Vec<(String, String)> {
    sig.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect()
}

#[test]
fn assignment_plans_per_direction() {
    let (rs, reg) = rules();
    let rule = rs.rule("AssignmentWithExpRule").unwrap();
    let fwd = operationalize(rule, Direction::Forward, &reg).unwrap();
    assert_eq!(
        fwd.plan.signature(),
        pairs(&[
            ("isAnIdentifier", "B"),
            ("concatWithOperatorSymbol", "BBBF"),
            ("concat", "BBBF"),
            ("addSuffix", "BBF"),
        ])
    );
    let bwd = operationalize(rule, Direction::Backward, &reg).unwrap();
    assert_eq!(
        bwd.plan.signature(),
        pairs(&[
            ("addSuffix", "FBB"),
            ("concat", "BFFB"),
            ("isAnIdentifier", "B"),
            ("concatWithOperatorSymbol", "FFFB"),
        ])
    );
    let check = operationalize(rule, Direction::Check, &reg).unwrap();
    // Temps stay free when checking, so they are still computed forward.
    assert_eq!(
        check.plan.signature(),
        pairs(&[
            ("isAnIdentifier", "B"),
            ("concatWithOperatorSymbol", "BBBF"),
            ("concat", "BBBF"),
            ("addSuffix", "BBB"),
        ])
    );
}

#[test]
fn statement_rules_wait_for_their_context() {
    let (rs, reg) = rules();
    let ast = parse_program("void m() { a = b; }").unwrap();
    let triple = TripleModel::new(ast, Graph::new(flow_metamodel()), corr_metamodel());
    let marks = Marks::default();

    let method = operationalize(rs.rule("MethodRule").unwrap(), Direction::Forward, &reg).unwrap();
    assert_eq!(find_matches(&method, &triple, &marks, &reg).len(), 1);

    let assign = operationalize(rs.rule("AssignmentSimpleRule").unwrap(), Direction::Forward, &reg).unwrap();
    assert!(find_matches(&assign, &triple, &marks, &reg).is_empty());
}

#[test]
fn duplicate_registration_is_refused() {
    let (_, mut reg) = rules();
    assert_eq!(
        reg.register_resolver("findNextFlowNode", |_, _| None),
        Err(RegistryError::DuplicateResolver("findNextFlowNode".into()))
    );
    assert_eq!(
        reg.register_post_processor("setIndex", |_, _| Ok(())),
        Err(RegistryError::DuplicatePostProcessor("setIndex".into()))
    );
}

#[test]
fn backward_splits_the_assignment() {
    let (rs, reg) = rules();
    let fwd = forward_transform(parse_program("void m() { a = b + 3; }").unwrap(), &rs, &reg).unwrap();
    let back = backward_transform(fwd.triple.target, &rs, &reg).unwrap();
    let ast = &back.triple.source;
    let op = ast.nodes().find(|n| n.ty == "BinOp").unwrap();
    assert_eq!(op.str_attr("value"), Some("+"));
    let operands: Vec<&str> = ast
        .children(op.id, "child")
        .into_iter()
        .map(|c| ast.node(c).unwrap().str_attr("value").unwrap())
        .collect();
    assert_eq!(operands, ["b", "3"]);
    let lhs = ast.nodes().find(|n| n.ty == "Ident").unwrap();
    assert_eq!(lhs.str_attr("value"), Some("a"));
}

#[test]
fn backward_reports_untranslatable_text() {
    let (rs, reg) = rules();
    let fwd = forward_transform(parse_program("void m() { a = b; }").unwrap(), &rs, &reg).unwrap();
    let mut flow = fwd.triple.target;
    let stmt = flow.nodes().find(|n| n.ty == "SimpleStmt").unwrap().id;
    flow.set_attr(stmt, "txt", Value::from("a = b")).unwrap();
    match backward_transform(flow, &rs, &reg) {
        Err(TransformError::Stuck { untranslated, .. }) => {
            assert!(untranslated.iter().any(|u| u.contains("SimpleStmt")), "{untranslated:?}");
        }
        other => panic!("expected a stuck transformation, got {other:?}"),
    }
}

#[test]
fn program_without_method_is_stuck() {
    let (rs, reg) = rules();
    let mut ast = Graph::new(ast_metamodel());
    ast.add_node("Program", Vec::<(String, Value)>::new()).unwrap();
    assert!(matches!(
        forward_transform(ast, &rs, &reg),
        Err(TransformError::Stuck { .. })
    ));
}

#[test]
fn wrong_metamodel_is_refused() {
    let (rs, reg) = rules();
    let flow = Graph::new(flow_metamodel());
    assert!(matches!(
        forward_transform(flow, &rs, &reg),
        Err(TransformError::WrongMetamodel { .. })
    ));
}

#[test]
fn check_rejects_edited_index() {
    let (rs, reg) = rules();
    let fwd = forward_transform(parse_program("void m() { a = b; c = d; }").unwrap(), &rs, &reg).unwrap();
    let mut triple = fwd.triple;
    assert!(check_consistency(&triple, &rs, &reg).unwrap().consistent);
    let stmt = triple.source.nodes().find(|n| n.ty == "Assign").unwrap().id;
    triple.source.set_attr(stmt, "index", Value::Int(7)).unwrap();
    let report = check_consistency(&triple, &rs, &reg).unwrap();
    assert!(!report.consistent);
    assert!(!report.unmarked().is_empty());
}

#[test]
fn forward_trace_lists_created_elements() {
    let (rs, reg) = rules();
    let fwd = forward_transform(parse_program("void m() { }").unwrap(), &rs, &reg).unwrap();
    assert_eq!(
        fwd.trace.iter().map(ToString::to_string).collect::<Vec<_>>(),
        ["forward MethodRule anchor=s:n0 created=[t:n0 t:n1 t:n2 t:e0 t:e1 c:c0 c:c1]"]
    );
}
